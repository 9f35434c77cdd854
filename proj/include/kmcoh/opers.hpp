#pragma once

#include "kmcoh/cartan_core.hpp"
#include "kmcoh/exact_linalg.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kmcoh {

enum class Singularity { Regular, RS };

inline std::string to_string(Singularity s) { return s == Singularity::Regular ? "regular" : "RS"; }

struct PrecisionMismatch : std::invalid_argument {
    PrecisionMismatch() : std::invalid_argument("gauge element and operator have different precision") {}
};

// (basis index or slice index j, power of t) -> coefficient
using SeriesCoeffs = std::map<std::pair<int, int>, Rational>;

// Regular operators d_t + p_{-1} + v(t) are truncated by energy: the term x t^m of basis
// element a has energy height(a) + 1 + m, and everything of energy < precision is exact.
// RS operators d_t + t^{-1}(p_{-1} + v(t)) are truncated t-adically: powers < precision.
struct OperRep {
    std::string algebra;
    int precision = 1;
    Singularity singularity = Singularity::Regular;
    SeriesCoeffs v;  // keys (a, m), a in b
};

// d_t + p_{-1} + sum_j c_j(t) p_j; c_{j,m} has energy d_j + 1 + m.
struct CanonicalOper {
    std::string algebra;
    int precision = 1;
    SeriesCoeffs c;  // keys (j, m)
};

// g = exp(x(t)), x in n[[t]]; the term of a at t^m has energy height(a) + m.
struct GaugeElement {
    int precision = 1;
    Singularity singularity = Singularity::Regular;
    SeriesCoeffs x;
};

inline int connection_energy(const SimpleLieAlgebra& L, int a, int m) { return L.height[a] + 1 + m; }
inline int group_energy(const SimpleLieAlgebra& L, int a, int m) { return L.height[a] + m; }

namespace detail {

// Matrix-valued truncated series in the defining representation; c[m] is the t^m coefficient.
// Graded mode keeps entry (i, j) of c[m] iff j - i + m <= emax; t-adic mode keeps m <= emax.
struct MatSeries {
    int n = 0, emax = 0;
    bool graded = true;
    std::vector<DenseQ> c;

    MatSeries(int n_, int emax_, bool graded_) : n(n_), emax(emax_), graded(graded_) {
        c.assign(static_cast<std::size_t>(emax_ + (graded_ ? n_ : 1)), dense_zero(n_));
    }
    int powers() const { return static_cast<int>(c.size()); }
    bool keep(int i, int j, int m) const { return graded ? (j - i + m <= emax) : (m <= emax); }
    void mask(int e) {
        for (int m = 0; m < powers(); ++m)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (graded ? (j - i + m > e) : (m > e)) c[m][i][j] = 0;
    }
    static MatSeries identity(int n, int emax, bool graded) {
        MatSeries r(n, emax, graded);
        for (int i = 0; i < n; ++i) r.c[0][i][i] = 1;
        return r;
    }
};

inline MatSeries operator*(const MatSeries& a, const MatSeries& b) {
    MatSeries r(a.n, a.emax, a.graded);
    for (int p = 0; p < a.powers(); ++p)
        for (int q = 0; p + q < r.powers() && q < b.powers(); ++q)
            for (int i = 0; i < a.n; ++i)
                for (int k = 0; k < a.n; ++k) {
                    if (is_zero(a.c[p][i][k])) continue;
                    for (int j = 0; j < a.n; ++j)
                        if (!is_zero(b.c[q][k][j]) && r.keep(i, j, p + q)) r.c[p + q][i][j] += a.c[p][i][k] * b.c[q][k][j];
                }
    return r;
}
inline MatSeries operator+(MatSeries a, const MatSeries& b) {
    for (int m = 0; m < a.powers(); ++m)
        for (int i = 0; i < a.n; ++i)
            for (int j = 0; j < a.n; ++j) a.c[m][i][j] += b.c[m][i][j];
    return a;
}
inline MatSeries scaled(MatSeries a, const Rational& s) {
    for (auto& M : a.c)
        for (auto& row : M)
            for (auto& x : row) x *= s;
    return a;
}
inline MatSeries derivative(const MatSeries& a) {
    MatSeries r(a.n, a.emax, a.graded);
    for (int m = 1; m < a.powers(); ++m)
        for (int i = 0; i < a.n; ++i)
            for (int j = 0; j < a.n; ++j) r.c[m - 1][i][j] = a.c[m][i][j] * m;
    return r;
}
// t d/dt
inline MatSeries euler(const MatSeries& a) {
    MatSeries r = a;
    for (int m = 0; m < a.powers(); ++m)
        for (auto& row : r.c[m])
            for (auto& x : row) x *= m;
    return r;
}

// exp of a strictly upper triangular series (finite sum)
inline MatSeries mexp(const MatSeries& x) {
    MatSeries r = MatSeries::identity(x.n, x.emax, x.graded), term = r;
    for (int k = 1; k < x.n; ++k) {
        term = scaled(term * x, Rational(1) / k);
        r = r + term;
    }
    return r;
}
// log of a unipotent upper triangular series
inline MatSeries mlog(const MatSeries& g) {
    MatSeries u = g + scaled(MatSeries::identity(g.n, g.emax, g.graded), -1);
    MatSeries r(g.n, g.emax, g.graded), pw = u;
    for (int k = 1; k < g.n; ++k) {
        r = r + scaled(pw, Rational(k % 2 ? 1 : -1) / k);
        pw = pw * u;
    }
    return r;
}

inline MatSeries from_coeffs(const SimpleLieAlgebra& L, const SeriesCoeffs& v, int emax, bool graded) {
    MatSeries r(L.n, emax, graded);
    for (auto& [key, x] : v) {
        auto [a, m] = key;
        if (m < 0 || m >= r.powers()) continue;
        for (int i = 0; i < L.n; ++i)
            for (int j = 0; j < L.n; ++j)
                if (!is_zero(L.rep[a][i][j])) r.c[m][i][j] += x * L.rep[a][i][j];
    }
    return r;
}
inline SeriesCoeffs to_coeffs(const SimpleLieAlgebra& L, const MatSeries& s) {
    SeriesCoeffs out;
    for (int m = 0; m < s.powers(); ++m) {
        auto x = L.decompose(s.c[m]);
        for (int a = 0; a < L.dim; ++a)
            if (!is_zero(x[a])) out[{a, m}] = x[a];
    }
    return out;
}

inline MatSeries p_minus_series(const SimpleLieAlgebra& L, int emax, bool graded) {
    MatSeries r(L.n, emax, graded);
    r.c[0] = L.to_matrix(principal_triple(L).p_minus);
    return r;
}

// Split p_{-1} + v back out; anything outside p_{-1} + b is a shape error.
inline SeriesCoeffs strip_p_minus(const SimpleLieAlgebra& L, MatSeries A) {
    A = A + scaled(p_minus_series(L, A.emax, A.graded), -1);
    SeriesCoeffs v = to_coeffs(L, A);
    for (auto& [key, x] : v)
        if (!L.in_borel(key.first)) throw std::logic_error("gauge transformation left the oper shape");
    return v;
}

inline void check_gauge(const SimpleLieAlgebra& L, const GaugeElement& g) {
    for (auto& [key, x] : g.x)
        if (!L.in_nilpotent(key.first) || key.second < 0) throw std::invalid_argument("gauge element must lie in n[[t]]");
}

inline int conn_emax(const OperRep& op) { return op.singularity == Singularity::Regular ? op.precision - 2 : op.precision - 1; }

}  // namespace detail

inline void validate(const SimpleLieAlgebra& L, const OperRep& op) {
    if (op.precision < 1) throw std::invalid_argument("precision must be positive");
    for (auto& [key, x] : op.v) {
        auto [a, m] = key;
        if (a < 0 || a >= L.dim || !L.in_borel(a)) throw std::invalid_argument("oper coefficient outside b");
        if (m < 0) throw std::invalid_argument("negative power in oper");
        bool inside = op.singularity == Singularity::Regular ? connection_energy(L, a, m) < op.precision : m < op.precision;
        if (!inside) throw std::invalid_argument("oper coefficient beyond the precision");
    }
}

inline SeriesCoeffs drop_zeros(SeriesCoeffs v) {
    for (auto it = v.begin(); it != v.end();) it = is_zero(it->second) ? v.erase(it) : std::next(it);
    return v;
}

// g . (d_t + A) = d_t + g A g^{-1} - (d_t g) g^{-1}; for RS, A = t^{-1}(p_{-1} + v).
inline OperRep gauge_transform(const SimpleLieAlgebra& L, const GaugeElement& g, const OperRep& op) {
    if (g.precision != op.precision || g.singularity != op.singularity) throw PrecisionMismatch();
    validate(L, op);
    detail::check_gauge(L, g);
    bool graded = op.singularity == Singularity::Regular;
    int gmax = graded ? op.precision - 1 : op.precision - 1;
    auto X = detail::from_coeffs(L, g.x, gmax, graded);
    X.mask(gmax);
    auto G = detail::mexp(X), Ginv = detail::mexp(detail::scaled(X, -1));
    auto A = detail::p_minus_series(L, gmax, graded) + detail::from_coeffs(L, op.v, gmax, graded);
    detail::MatSeries out = G * A * Ginv;
    auto dG = graded ? detail::derivative(G) : detail::euler(G);
    out = out + detail::scaled(dG * Ginv, -1);
    out.mask(detail::conn_emax(op));
    OperRep r = op;
    r.v = drop_zeros(detail::strip_p_minus(L, out));
    return r;
}

// g1 g2 as a single exponential.
inline GaugeElement gauge_compose(const SimpleLieAlgebra& L, const GaugeElement& g1, const GaugeElement& g2) {
    if (g1.precision != g2.precision || g1.singularity != g2.singularity) throw PrecisionMismatch();
    bool graded = g1.singularity == Singularity::Regular;
    int gmax = g1.precision - 1;
    auto G = detail::mexp(detail::from_coeffs(L, g1.x, gmax, graded)) * detail::mexp(detail::from_coeffs(L, g2.x, gmax, graded));
    GaugeElement r = g1;
    r.x = drop_zeros(detail::to_coeffs(L, detail::mlog(G)));
    return r;
}
inline GaugeElement gauge_inverse(const GaugeElement& g) {
    GaugeElement r = g;
    for (auto& [k, x] : r.x) x = -x;
    return r;
}

inline OperRep to_oper(const SimpleLieAlgebra& L, const CanonicalOper& c) {
    auto T = principal_triple(L);
    OperRep op{c.algebra, c.precision, Singularity::Regular, {}};
    for (auto& [key, x] : c.c) {
        auto [j, m] = key;
        for (int a = 0; a < L.dim; ++a)
            if (!is_zero(T.centralizer[j][a])) op.v[{a, m}] += x * T.centralizer[j][a];
    }
    op.v = drop_zeros(op.v);
    return op;
}

// Drinfeld-Sokolov reduction, solved one energy at a time: at energy E the gauge
// correction y in n satisfies v_E + [y, p_{-1}] - d_t y in span(p_j t^m).
inline std::pair<CanonicalOper, GaugeElement> canonical_form(const SimpleLieAlgebra& L, const OperRep& op) {
    if (op.singularity != Singularity::Regular) throw std::invalid_argument("canonical form needs a regular oper");
    validate(L, op);
    auto T = principal_triple(L);
    const int K = op.precision, gmax = K - 1;
    detail::MatSeries A = detail::p_minus_series(L, gmax, true) + detail::from_coeffs(L, op.v, gmax, true);
    detail::MatSeries G = detail::MatSeries::identity(L.n, gmax, true);
    CanonicalOper can{op.algebra, K, {}};
    const int ell = static_cast<int>(T.degrees.size());

    for (int E = 1; E < K; ++E) {
        // coordinates (a in b, m) of the energy-E part
        std::vector<std::pair<int, int>> rows;
        for (int a = 0; a < L.dim; ++a)
            if (L.in_borel(a))
                for (int m = 0; connection_energy(L, a, m) <= E; ++m)
                    if (connection_energy(L, a, m) == E) rows.emplace_back(a, m);
        std::map<std::pair<int, int>, int> ridx;
        for (std::size_t i = 0; i < rows.size(); ++i) ridx[rows[i]] = static_cast<int>(i);

        std::vector<std::pair<int, int>> ys;  // (beta, m)
        for (int b = 0; b < L.dim; ++b)
            if (L.in_nilpotent(b) && group_energy(L, b, 0) <= E) ys.emplace_back(b, E - L.height[b]);
        std::vector<std::pair<int, int>> cs;  // (j, m)
        for (int j = 0; j < ell; ++j)
            if (T.degrees[j] + 1 <= E) cs.emplace_back(j, E - T.degrees[j] - 1);

        SparseMatrixQ M(static_cast<int>(rows.size()), static_cast<int>(ys.size() + cs.size()));
        for (std::size_t k = 0; k < ys.size(); ++k) {
            auto [b, m] = ys[k];
            auto br = L.bracket_of(L.unit(b), T.p_minus);
            for (int a = 0; a < L.dim; ++a)
                if (!is_zero(br[a])) M.add(ridx.at({a, m}), static_cast<int>(k), br[a]);
            if (m > 0) M.add(ridx.at({b, m - 1}), static_cast<int>(k), Rational(-m));
        }
        for (std::size_t k = 0; k < cs.size(); ++k) {
            auto [j, m] = cs[k];
            for (int a = 0; a < L.dim; ++a)
                if (!is_zero(T.centralizer[j][a])) M.add(ridx.at({a, m}), static_cast<int>(ys.size() + k), -T.centralizer[j][a]);
        }
        SparseVecQ rhs;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            auto [a, m] = rows[i];
            Rational x = L.decompose(A.c[m])[a];
            if (!is_zero(x)) rhs[static_cast<int>(i)] = -x;
        }
        if (rank(M) != M.cols()) throw std::logic_error("slice is not transversal at this energy");
        auto sol = in_image(M, rhs);
        if (!sol) throw std::logic_error("no gauge correction at this energy");
        SeriesCoeffs y;
        for (auto& [k, x] : *sol) {
            if (k < static_cast<int>(ys.size()))
                y[ys[static_cast<std::size_t>(k)]] = x;
            else
                can.c[cs[static_cast<std::size_t>(k) - ys.size()]] = x;
        }
        if (y.empty()) continue;
        auto Y = detail::from_coeffs(L, y, gmax, true);
        auto g = detail::mexp(Y), ginv = detail::mexp(detail::scaled(Y, -1));
        A = g * A * ginv + detail::scaled(detail::derivative(g) * ginv, -1);
        A.mask(K - 2);
        G = g * G;
    }
    GaugeElement gauge{K, Singularity::Regular, drop_zeros(detail::to_coeffs(L, detail::mlog(G)))};
    can.c = drop_zeros(can.c);
    // the reduced operator must be exactly the slice representative
    A.mask(K - 2);
    if (detail::strip_p_minus(L, A) != to_oper(L, can).v) throw std::logic_error("reduction did not reach the slice");
    return {can, gauge};
}

// Characteristic polynomial of M, monic: returns c with det(x - M) = x^n + c[n-1] x^{n-1} + ... + c[0].
inline std::vector<Rational> characteristic_polynomial(const DenseQ& M) {
    int n = static_cast<int>(M.size());
    std::vector<Rational> c(static_cast<std::size_t>(n) + 1, Rational(0));
    c[n] = 1;
    DenseQ Mk = dense_zero(n);  // Faddeev-LeVerrier
    for (int k = 1; k <= n; ++k) {
        DenseQ prev = Mk;
        for (int i = 0; i < n; ++i) prev[i][i] += c[n - k + 1];
        Mk = dense_mul(M, prev);
        c[n - k] = -dense_trace(Mk) / k;
    }
    c.pop_back();
    return c;
}

// Residue of an RS oper: char poly coefficients of p_{-1} + v(0), a complete W-invariant for sl_n.
inline std::vector<Rational> rs_residue(const SimpleLieAlgebra& L, const OperRep& op) {
    if (op.singularity != Singularity::RS) throw std::invalid_argument("residue needs an RS oper");
    validate(L, op);
    std::vector<Rational> x = principal_triple(L).p_minus;
    for (auto& [key, c] : op.v)
        if (key.second == 0) x[key.first] += c;
    return characteristic_polynomial(L.to_matrix(x));
}

// RS form of d_t + p_{-1} + sum_j t^{-d_j-1} c_j(t) p_j after the gauge t^{rho}: v(t) = -rho + sum_j c_j(t) p_j.
inline OperRep rs_from_canonical(const SimpleLieAlgebra& L, const CanonicalOper& c) {
    auto T = principal_triple(L);
    OperRep op{c.algebra, c.precision, Singularity::RS, {}};
    for (int a = 0; a < L.dim; ++a)
        if (!is_zero(T.rho[a])) op.v[{a, 0}] -= T.rho[a];
    for (auto& [key, x] : c.c) {
        auto [j, m] = key;
        for (int a = 0; a < L.dim; ++a)
            if (!is_zero(T.centralizer[j][a])) op.v[{a, m}] += x * T.centralizer[j][a];
    }
    op.v = drop_zeros(op.v);
    return op;
}

// ---- Hilbert series of the free skew-commutative algebras ----

enum class SeriesLabel { FunC, OmegaC, FunCRS, OmegaCRS, FunOp, OmegaOp, OmegaOpRS };

inline std::string to_string(SeriesLabel s) {
    switch (s) {
        case SeriesLabel::FunC: return "FunC";
        case SeriesLabel::OmegaC: return "OmegaC";
        case SeriesLabel::FunCRS: return "FunCRS";
        case SeriesLabel::OmegaCRS: return "OmegaCRS";
        case SeriesLabel::FunOp: return "FunOp";
        case SeriesLabel::OmegaOp: return "OmegaOp";
        case SeriesLabel::OmegaOpRS: return "OmegaOpRS";
    }
    return "?";
}
inline SeriesLabel parse_series_label(const std::string& s) {
    for (auto l : {SeriesLabel::FunC, SeriesLabel::OmegaC, SeriesLabel::FunCRS, SeriesLabel::OmegaCRS, SeriesLabel::FunOp,
                   SeriesLabel::OmegaOp, SeriesLabel::OmegaOpRS})
        if (to_string(l) == s) return l;
    throw std::invalid_argument("unknown series label: " + s);
}

struct HilbertSeries {
    SeriesLabel label;
    int cutoff = 0;
    std::vector<int> generators;            // energies, each carrying an even and (for forms) an odd copy
    bool forms = false;
    std::vector<std::vector<long>> coeff;   // coeff[p][E]
};

// Generator energies.  C labels read d_i off the invariant polynomials; Op labels read them off the
// rho-weights of the slice p_j, so the two routes share no data.
inline std::vector<int> generator_energies(SeriesLabel label, const SimpleLieAlgebra& L, int cutoff) {
    std::vector<int> degs;
    bool op = label == SeriesLabel::FunOp || label == SeriesLabel::OmegaOp || label == SeriesLabel::OmegaOpRS;
    if (op) {
        degs = principal_triple(L).degrees;
    } else {
        for (auto& P : invariant_polynomials(L)) degs.push_back(P.exponent);
    }
    bool rs = label == SeriesLabel::FunCRS || label == SeriesLabel::OmegaCRS || label == SeriesLabel::OmegaOpRS;
    std::vector<int> out;
    for (int d : degs)
        for (int n = rs ? -d : 0; n + d + 1 <= cutoff; ++n) out.push_back(n + d + 1);
    std::sort(out.begin(), out.end());
    return out;
}

inline HilbertSeries hilbert_series(SeriesLabel label, const SimpleLieAlgebra& L, int cutoff, int max_p) {
    HilbertSeries h{label, cutoff, generator_energies(label, L, cutoff), false, {}};
    h.forms = label == SeriesLabel::OmegaC || label == SeriesLabel::OmegaCRS || label == SeriesLabel::OmegaOp ||
              label == SeriesLabel::OmegaOpRS;
    int P = std::max(max_p, 0);
    h.coeff.assign(static_cast<std::size_t>(P) + 1, std::vector<long>(static_cast<std::size_t>(cutoff) + 1, 0));
    h.coeff[0][0] = 1;
    for (int g : h.generators) {
        // even: 1/(1 - q^g)
        for (auto& row : h.coeff)
            for (int E = g; E <= cutoff; ++E) row[E] += row[E - g];
        if (!h.forms) continue;
        // odd: 1 + s q^g
        for (int p = P; p >= 1; --p)
            for (int E = cutoff; E >= g; --E) h.coeff[p][E] += h.coeff[p - 1][E - g];
    }
    return h;
}

inline std::vector<long> expected_dimensions(SeriesLabel label, const SimpleLieAlgebra& L, int cutoff, int p) {
    if (p < 0) return std::vector<long>(static_cast<std::size_t>(cutoff) + 1, 0);
    return hilbert_series(label, L, cutoff, p).coeff[static_cast<std::size_t>(p)];
}

// ---- JSON ----

inline nlohmann::json coeffs_to_json(const std::vector<std::string>& names, const SeriesCoeffs& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto& [key, x] : v) arr.push_back({{"basis", names.at(static_cast<std::size_t>(key.first))}, {"power", key.second}, {"value", x.get_str()}});
    return arr;
}
inline SeriesCoeffs coeffs_from_json(const std::vector<std::string>& names, const nlohmann::json& arr) {
    SeriesCoeffs v;
    for (auto& e : arr) {
        std::string b = e.at("basis").get<std::string>();
        auto it = std::find(names.begin(), names.end(), b);
        if (it == names.end()) throw std::invalid_argument("unknown basis label: " + b);
        int a = static_cast<int>(it - names.begin());
        v[{a, e.at("power").get<int>()}] += parse_rational(e.at("value").get<std::string>());
    }
    return drop_zeros(v);
}
inline std::vector<std::string> slice_names(const SimpleLieAlgebra& L) {
    std::vector<std::string> n;
    for (std::size_t j = 0; j < principal_triple(L).degrees.size(); ++j) n.push_back("p" + std::to_string(j + 1));
    return n;
}

inline nlohmann::json to_json(const SimpleLieAlgebra& L, const OperRep& op) {
    return {{"algebra", op.algebra},
            {"precision", op.precision},
            {"singularity", to_string(op.singularity)},
            {"coefficients", coeffs_to_json(L.labels, op.v)}};
}
inline OperRep oper_from_json(const SimpleLieAlgebra& L, const nlohmann::json& j) {
    OperRep op;
    op.algebra = j.at("algebra").get<std::string>();
    if (op.algebra != L.name) throw std::invalid_argument("oper algebra does not match");
    op.precision = j.at("precision").get<int>();
    std::string s = j.value("singularity", "regular");
    if (s == "regular")
        op.singularity = Singularity::Regular;
    else if (s == "RS")
        op.singularity = Singularity::RS;
    else
        throw std::invalid_argument("unknown singularity: " + s);
    op.v = coeffs_from_json(L.labels, j.at("coefficients"));
    validate(L, op);
    return op;
}
inline nlohmann::json to_json(const SimpleLieAlgebra& L, const CanonicalOper& c) {
    return {{"algebra", c.algebra},
            {"precision", c.precision},
            {"singularity", "regular"},
            {"coefficients", coeffs_to_json(slice_names(L), c.c)}};
}
inline nlohmann::json to_json(const SimpleLieAlgebra& L, const GaugeElement& g) {
    return {{"precision", g.precision}, {"singularity", to_string(g.singularity)}, {"coefficients", coeffs_to_json(L.labels, g.x)}};
}
inline nlohmann::json to_json(const HilbertSeries& h) {
    return {{"label", to_string(h.label)}, {"cutoff", h.cutoff}, {"generators", h.generators}, {"coefficients", h.coeff}};
}

}  // namespace kmcoh
