#pragma once

#include "kmcoh/exact_linalg.hpp"
#include "kmcoh/rational.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kmcoh {

struct UnknownAlgebra : std::invalid_argument {
    explicit UnknownAlgebra(const std::string& name) : std::invalid_argument("unknown algebra: " + name) {}
};

using DenseQ = std::vector<std::vector<Rational>>;

inline DenseQ dense_zero(int n) { return DenseQ(n, std::vector<Rational>(n, Rational(0))); }

inline DenseQ dense_mul(const DenseQ& a, const DenseQ& b) {
    int n = static_cast<int>(a.size());
    DenseQ r = dense_zero(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (is_zero(a[i][k])) continue;
            for (int j = 0; j < n; ++j) r[i][j] += a[i][k] * b[k][j];
        }
    return r;
}

inline Rational dense_trace(const DenseQ& a) {
    Rational t = 0;
    for (std::size_t i = 0; i < a.size(); ++i) t += a[i][i];
    return t;
}

enum class RootKind { Positive, Cartan, Negative };

// Chevalley basis of sl_n: positive roots by height, then h_i, then negatives.
struct SimpleLieAlgebra {
    std::string name;
    int n = 0;     // defining representation size
    int rank = 0;
    int dim = 0;
    std::vector<std::string> labels;
    std::vector<RootKind> kind;
    std::vector<std::vector<int>> root;  // simple-root coordinates, zero for Cartan
    std::vector<int> height;             // signed height
    std::vector<int> e, f, h;            // simple generator indices
    std::vector<std::vector<int>> cartan_matrix;
    std::vector<DenseQ> rep;             // defining representation
    // bracket[a][b] = [(c, mu^{ab}_c)]
    std::vector<std::vector<std::vector<std::pair<int, Rational>>>> bracket;

    Rational mu(int a, int b, int c) const {
        for (auto& [k, x] : bracket[a][b])
            if (k == c) return x;
        return 0;
    }
    // Eigenvalues of the simple coroots on basis element a.
    std::vector<int> weight(int a) const {
        std::vector<int> w(static_cast<std::size_t>(rank), 0);
        for (int k = 0; k < rank; ++k)
            for (int j = 0; j < rank; ++j) w[k] += root[a][j] * cartan_matrix[k][j];
        return w;
    }
    bool in_borel(int a) const { return kind[a] != RootKind::Negative; }
    bool in_nilpotent(int a) const { return kind[a] == RootKind::Positive; }
    bool in_cartan(int a) const { return kind[a] == RootKind::Cartan; }

    // Coordinates of a traceless matrix in the basis.
    std::vector<Rational> decompose(const DenseQ& m) const {
        std::vector<Rational> c(static_cast<std::size_t>(dim), Rational(0));
        Rational diag_sum = 0;
        for (int i = 0; i < n; ++i) diag_sum += m[i][i];
        if (!is_zero(diag_sum)) throw std::invalid_argument("matrix is not traceless");
        for (int a = 0; a < dim; ++a) {
            if (kind[a] == RootKind::Cartan) continue;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (!is_zero(rep[a][i][j])) c[a] = m[i][j];
        }
        Rational acc = 0;
        for (int k = 0; k < rank; ++k) {
            acc += m[k][k];
            c[h[k]] = acc;
        }
        return c;
    }
    DenseQ to_matrix(const std::vector<Rational>& x) const {
        DenseQ m = dense_zero(n);
        for (int a = 0; a < dim; ++a) {
            if (is_zero(x[a])) continue;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) m[i][j] += x[a] * rep[a][i][j];
        }
        return m;
    }
    std::vector<Rational> bracket_of(const std::vector<Rational>& x, const std::vector<Rational>& y) const {
        std::vector<Rational> r(static_cast<std::size_t>(dim), Rational(0));
        for (int a = 0; a < dim; ++a) {
            if (is_zero(x[a])) continue;
            for (int b = 0; b < dim; ++b) {
                if (is_zero(y[b])) continue;
                for (auto& [c, m] : bracket[a][b]) r[c] += x[a] * y[b] * m;
            }
        }
        return r;
    }
    std::vector<Rational> unit(int a) const {
        std::vector<Rational> r(static_cast<std::size_t>(dim), Rational(0));
        r[a] = 1;
        return r;
    }
};

inline SimpleLieAlgebra build_simple_lie_algebra(const std::string& name) {
    if (name.size() != 3 || name.rfind("sl", 0) != 0 || name[2] < '2' || name[2] > '5') throw UnknownAlgebra(name);
    SimpleLieAlgebra L;
    L.name = name;
    L.n = name[2] - '0';
    L.rank = L.n - 1;
    int n = L.n;
    auto E = [n](int i, int j) {
        DenseQ m = dense_zero(n);
        m[i][j] = 1;
        return m;
    };
    std::vector<std::pair<int, int>> pos;
    for (int ht = 1; ht < n; ++ht)
        for (int i = 0; i + ht < n; ++i) pos.emplace_back(i, i + ht);
    auto root_of = [&](int i, int j) {
        std::vector<int> r(static_cast<std::size_t>(L.rank), 0);
        for (int k = i; k < j; ++k) r[k] = 1;
        return r;
    };
    auto label = [](char c, int i, int j) { return std::string(1, c) + std::to_string(i + 1) + std::to_string(j + 1); };
    for (auto [i, j] : pos) {
        L.rep.push_back(E(i, j));
        L.kind.push_back(RootKind::Positive);
        L.root.push_back(root_of(i, j));
        L.height.push_back(j - i);
        L.labels.push_back(n == 2 ? "e" : (j == i + 1 ? "e" + std::to_string(i + 1) : label('e', i, j)));
    }
    for (int k = 0; k < L.rank; ++k) {
        DenseQ m = dense_zero(n);
        m[k][k] = 1;
        m[k + 1][k + 1] = -1;
        L.rep.push_back(m);
        L.kind.push_back(RootKind::Cartan);
        L.root.push_back(std::vector<int>(static_cast<std::size_t>(L.rank), 0));
        L.height.push_back(0);
        L.labels.push_back(n == 2 ? "h" : "h" + std::to_string(k + 1));
    }
    for (auto [i, j] : pos) {
        L.rep.push_back(E(j, i));
        L.kind.push_back(RootKind::Negative);
        auto r = root_of(i, j);
        for (auto& x : r) x = -x;
        L.root.push_back(r);
        L.height.push_back(i - j);
        L.labels.push_back(n == 2 ? "f" : (j == i + 1 ? "f" + std::to_string(i + 1) : label('f', i, j)));
    }
    L.dim = static_cast<int>(L.rep.size());
    // sl3 labels follow e1, e2, e3 = [e1, e2]
    if (n == 3) {
        L.labels = {"e1", "e2", "e3", "h1", "h2", "f1", "f2", "f3"};
    }
    int np = static_cast<int>(pos.size());
    for (int k = 0; k < L.rank; ++k) {
        L.e.push_back(k);  // height-one roots come first, ordered by i
        L.h.push_back(np + k);
        L.f.push_back(np + L.rank + k);
    }
    L.cartan_matrix.assign(L.rank, std::vector<int>(L.rank, 0));
    for (int i = 0; i < L.rank; ++i)
        for (int j = 0; j < L.rank; ++j) L.cartan_matrix[i][j] = (i == j) ? 2 : (std::abs(i - j) == 1 ? -1 : 0);
    L.bracket.assign(L.dim, std::vector<std::vector<std::pair<int, Rational>>>(L.dim));
    for (int a = 0; a < L.dim; ++a)
        for (int b = 0; b < L.dim; ++b) {
            DenseQ ab = dense_mul(L.rep[a], L.rep[b]);
            DenseQ ba = dense_mul(L.rep[b], L.rep[a]);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) ab[i][j] -= ba[i][j];
            auto c = L.decompose(ab);
            for (int k = 0; k < L.dim; ++k)
                if (!is_zero(c[k])) L.bracket[a][b].emplace_back(k, c[k]);
        }
    return L;
}

template <class C>
struct BilinearForm {
    std::string tag;
    std::vector<std::vector<C>> m;
    const C& operator()(int a, int b) const { return m[a][b]; }
};
using BilinearFormQ = BilinearForm<Rational>;

inline BilinearFormQ trace_form(const SimpleLieAlgebra& L) {
    BilinearFormQ F{"kappa0", std::vector<std::vector<Rational>>(L.dim, std::vector<Rational>(L.dim, Rational(0)))};
    for (int a = 0; a < L.dim; ++a)
        for (int b = 0; b < L.dim; ++b) F.m[a][b] = dense_trace(dense_mul(L.rep[a], L.rep[b]));
    return F;
}

inline BilinearFormQ killing_form(const SimpleLieAlgebra& L) {
    BilinearFormQ F{"killing", std::vector<std::vector<Rational>>(L.dim, std::vector<Rational>(L.dim, Rational(0)))};
    // tr(ad a ad b) = sum_{c,d} mu^{b c}_d mu^{a d}_c
    for (int a = 0; a < L.dim; ++a)
        for (int b = 0; b < L.dim; ++b) {
            Rational t = 0;
            for (int c = 0; c < L.dim; ++c)
                for (auto& [d, x] : L.bracket[b][c]) t += x * L.mu(a, d, c);
            F.m[a][b] = t;
        }
    return F;
}

// Critical form: minus one half of the Killing form.
inline BilinearFormQ critical_form(const SimpleLieAlgebra& L) {
    BilinearFormQ F = killing_form(L);
    F.tag = "critical";
    for (auto& row : F.m)
        for (auto& x : row) x *= frac(-1, 2);
    return F;
}

// kappa_c + h kappa0 for a fixed rational h.
inline BilinearFormQ family_form(const SimpleLieAlgebra& L, const Rational& hval) {
    BilinearFormQ F = critical_form(L), K0 = trace_form(L);
    F.tag = "family(" + hval.get_str() + ")";
    for (int a = 0; a < L.dim; ++a)
        for (int b = 0; b < L.dim; ++b) F.m[a][b] += hval * K0.m[a][b];
    return F;
}

// kappa_c + h kappa0 with h symbolic.
inline BilinearForm<PolyQ> family_form_poly(const SimpleLieAlgebra& L) {
    BilinearFormQ C = critical_form(L), K0 = trace_form(L);
    BilinearForm<PolyQ> F{"family(h)", std::vector<std::vector<PolyQ>>(L.dim, std::vector<PolyQ>(L.dim))};
    for (int a = 0; a < L.dim; ++a)
        for (int b = 0; b < L.dim; ++b) F.m[a][b] = PolyQ(C.m[a][b]) + PolyQ::monomial(K0.m[a][b], 1);
    return F;
}

inline BilinearFormQ bilinear_form(const SimpleLieAlgebra& L, const std::string& tag) {
    if (tag == "kappa0") return trace_form(L);
    if (tag == "killing") return killing_form(L);
    if (tag == "critical") return critical_form(L);
    if (tag.rfind("family:", 0) == 0) return family_form(L, parse_rational(tag.substr(7)));
    throw std::invalid_argument("unknown form tag: " + tag);
}

template <class C>
inline BilinearForm<C> lift_form(const BilinearFormQ& F) {
    BilinearForm<C> G{F.tag, std::vector<std::vector<C>>(F.m.size())};
    for (std::size_t a = 0; a < F.m.size(); ++a)
        for (auto& x : F.m[a]) G.m[a].push_back(C(x));
    return G;
}

// Polynomial on g via g ~ g* : monomial = sorted multiset of coordinate indices.
using CoordMonomial = std::vector<int>;
using CoordPolynomial = std::map<CoordMonomial, Rational>;

struct InvariantPolynomial {
    int exponent = 0;  // d_i; polynomial degree is d_i + 1
    CoordPolynomial poly;
};

inline void poly_add(CoordPolynomial& p, CoordMonomial m, const Rational& c) {
    if (is_zero(c)) return;
    std::sort(m.begin(), m.end());
    auto it = p.find(m);
    if (it == p.end()) {
        p.emplace(std::move(m), c);
        return;
    }
    it->second += c;
    if (is_zero(it->second)) p.erase(it);
}

inline CoordPolynomial poly_mul(const CoordPolynomial& a, const CoordPolynomial& b) {
    CoordPolynomial r;
    for (auto& [ma, ca] : a)
        for (auto& [mb, cb] : b) {
            CoordMonomial m = ma;
            m.insert(m.end(), mb.begin(), mb.end());
            poly_add(r, m, Rational(ca * cb));
        }
    return r;
}

// Inverse of a dense rational matrix (Gauss-Jordan).
inline DenseQ dense_inverse(DenseQ a) {
    int n = static_cast<int>(a.size());
    DenseQ inv = dense_zero(n);
    for (int i = 0; i < n; ++i) inv[i][i] = 1;
    for (int c = 0; c < n; ++c) {
        int p = c;
        while (p < n && is_zero(a[p][c])) ++p;
        if (p == n) throw std::runtime_error("singular matrix");
        std::swap(a[p], a[c]);
        std::swap(inv[p], inv[c]);
        Rational s = a[c][c];
        for (int j = 0; j < n; ++j) {
            a[c][j] /= s;
            inv[c][j] /= s;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c || is_zero(a[r][c])) continue;
            Rational f = a[r][c];
            for (int j = 0; j < n; ++j) {
                a[r][j] -= f * a[c][j];
                inv[r][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

inline std::vector<int> exponents(const SimpleLieAlgebra& L) {
    std::vector<int> d;
    for (int k = 1; k < L.n; ++k) d.push_back(k);
    return d;
}

// P_i = tr(X^{d_i+1}) where X = sum_b (kappa0^{-1})^{ab} x_a J^b in the defining representation.
inline std::vector<InvariantPolynomial> invariant_polynomials(const SimpleLieAlgebra& L) {
    DenseQ kinv = dense_inverse(trace_form(L).m);
    int n = L.n;
    std::vector<std::vector<CoordPolynomial>> X(n, std::vector<CoordPolynomial>(n));
    for (int a = 0; a < L.dim; ++a)
        for (int b = 0; b < L.dim; ++b) {
            if (is_zero(kinv[a][b])) continue;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (!is_zero(L.rep[b][i][j])) poly_add(X[i][j], {a}, Rational(kinv[a][b] * L.rep[b][i][j]));
        }
    std::vector<InvariantPolynomial> out;
    auto power = X;
    for (int k = 2; k <= n; ++k) {
        std::vector<std::vector<CoordPolynomial>> next(n, std::vector<CoordPolynomial>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l)
                    for (auto& [m, c] : poly_mul(power[i][l], X[l][j])) poly_add(next[i][j], m, c);
        power = std::move(next);
        InvariantPolynomial P;
        P.exponent = k - 1;
        for (int i = 0; i < n; ++i)
            for (auto& [m, c] : power[i][i]) poly_add(P.poly, m, c);
        out.push_back(std::move(P));
    }
    return out;
}

// Coadjoint derivation x_a -> sum_c mu^{b a}_c x_c applied to p.
inline CoordPolynomial coadjoint_derivation(const SimpleLieAlgebra& L, int b, const CoordPolynomial& p) {
    CoordPolynomial r;
    for (auto& [m, c] : p)
        for (std::size_t i = 0; i < m.size(); ++i)
            for (auto& [k, x] : L.bracket[b][m[i]]) {
                CoordMonomial mm = m;
                mm[i] = k;
                poly_add(r, mm, Rational(c * x));
            }
    return r;
}

inline Rational evaluate(const CoordPolynomial& p, const std::vector<Rational>& x) {
    Rational s = 0;
    for (auto& [m, c] : p) {
        Rational t = c;
        for (int i : m) t *= x[i];
        s += t;
    }
    return s;
}

// Principal sl2 triple and a homogeneous basis of the centralizer of p_1.
struct PrincipalTriple {
    std::vector<Rational> p_minus, rho, p_plus;
    std::vector<int> degrees;                         // d_j
    std::vector<std::vector<Rational>> centralizer;   // p_j, ad(rho)-weight d_j
};

inline PrincipalTriple principal_triple(const SimpleLieAlgebra& L) {
    PrincipalTriple T;
    T.p_minus.assign(L.dim, Rational(0));
    T.rho.assign(L.dim, Rational(0));
    T.p_plus.assign(L.dim, Rational(0));
    for (int i : L.f) T.p_minus[i] = 1;
    // alpha_i(rho) = 1: A^T c = 1
    DenseQ At = dense_zero(L.rank);
    for (int i = 0; i < L.rank; ++i)
        for (int j = 0; j < L.rank; ++j) At[i][j] = L.cartan_matrix[j][i];
    DenseQ inv = dense_inverse(At);
    for (int j = 0; j < L.rank; ++j) {
        Rational c = 0;
        for (int i = 0; i < L.rank; ++i) c += inv[j][i];
        T.rho[L.h[j]] = c;
        T.p_plus[L.e[j]] = 2 * c;
    }
    // centralizer of p_plus, graded by height
    for (int ht = 1; ht < L.n; ++ht) {
        std::vector<int> idx;
        for (int a = 0; a < L.dim; ++a)
            if (L.height[a] == ht) idx.push_back(a);
        SparseMatrixQ M(L.dim, static_cast<int>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) {
            auto br = L.bracket_of(T.p_plus, L.unit(idx[k]));
            for (int a = 0; a < L.dim; ++a)
                if (!is_zero(br[a])) M.add(a, static_cast<int>(k), br[a]);
        }
        for (auto& v : kernel_basis(M)) {
            std::vector<Rational> p(static_cast<std::size_t>(L.dim), Rational(0));
            for (auto& [k, x] : v) p[idx[k]] = x;
            // p_1 = p_plus itself, so that [p_1, p_{-1}] = 2 rho
            if (ht == 1) p = T.p_plus;
            T.degrees.push_back(ht);
            T.centralizer.push_back(p);
        }
    }
    return T;
}

inline nlohmann::json to_json(const SimpleLieAlgebra& L) {
    nlohmann::json j;
    j["name"] = L.name;
    j["dim"] = L.dim;
    j["rank"] = L.rank;
    j["basis"] = L.labels;
    j["cartan_matrix"] = L.cartan_matrix;
    nlohmann::json sc = nlohmann::json::array();
    for (int a = 0; a < L.dim; ++a)
        for (int b = 0; b < L.dim; ++b)
            for (auto& [c, x] : L.bracket[a][b]) sc.push_back({a, b, c, x.get_str()});
    j["structure_constants"] = sc;
    auto form_json = [&](const BilinearFormQ& F) {
        nlohmann::json m = nlohmann::json::array();
        for (auto& row : F.m) {
            nlohmann::json r = nlohmann::json::array();
            for (auto& x : row) r.push_back(x.get_str());
            m.push_back(r);
        }
        return m;
    };
    j["forms"] = {{"kappa0", form_json(trace_form(L))},
                  {"killing", form_json(killing_form(L))},
                  {"critical", form_json(critical_form(L))}};
    j["exponents"] = exponents(L);
    return j;
}

}  // namespace kmcoh
