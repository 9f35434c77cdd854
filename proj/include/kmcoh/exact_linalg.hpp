#pragma once

#include "kmcoh/rational.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kmcoh {

// Sparse vector: index -> value, never stores zeros.
template <class C>
using SparseVec = std::map<int, C>;
using SparseVecQ = SparseVec<Rational>;

template <class C>
inline void sv_add(SparseVec<C>& v, int i, const C& x) {
    if (is_zero(x)) return;
    auto it = v.find(i);
    if (it == v.end()) {
        v.emplace(i, x);
        return;
    }
    it->second += x;
    if (is_zero(it->second)) v.erase(it);
}

// Column-major sparse matrix over a coefficient ring.
template <class C>
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), col_(static_cast<std::size_t>(cols)) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    void add(int r, int c, const C& x) {
        check(r, c);
        sv_add(col_[c], r, x);
    }
    void set(int r, int c, const C& x) {
        check(r, c);
        if (is_zero(x))
            col_[c].erase(r);
        else
            col_[c][r] = x;
    }
    C get(int r, int c) const {
        check(r, c);
        auto it = col_[c].find(r);
        return it == col_[c].end() ? C(0) : it->second;
    }
    const SparseVec<C>& column(int c) const { return col_.at(static_cast<std::size_t>(c)); }
    void set_column(int c, SparseVec<C> v) {
        for (auto& [r, x] : v) check(r, c);
        col_.at(static_cast<std::size_t>(c)) = std::move(v);
    }

    std::size_t nnz() const {
        std::size_t n = 0;
        for (auto& c : col_) n += c.size();
        return n;
    }
    bool is_zero() const { return nnz() == 0; }

    SparseVec<C> apply(const SparseVec<C>& v) const {
        SparseVec<C> out;
        for (auto& [c, x] : v) {
            if (c < 0 || c >= cols_) throw std::out_of_range("vector index out of range");
            for (auto& [r, y] : col_[c]) sv_add(out, r, C(y * x));
        }
        return out;
    }

    friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product dimension mismatch");
        SparseMatrix r(a.rows_, b.cols_);
        for (int c = 0; c < b.cols_; ++c) r.col_[c] = a.apply(b.col_[c]);
        return r;
    }
    friend SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("matrix sum dimension mismatch");
        SparseMatrix r = a;
        for (int c = 0; c < b.cols_; ++c)
            for (auto& [i, x] : b.col_[c]) sv_add(r.col_[c], i, x);
        return r;
    }
    SparseMatrix scaled(const C& s) const {
        SparseMatrix r(rows_, cols_);
        for (int c = 0; c < cols_; ++c)
            for (auto& [i, x] : col_[c]) sv_add(r.col_[c], i, C(x * s));
        return r;
    }
    SparseMatrix transpose() const {
        SparseMatrix r(cols_, rows_);
        for (int c = 0; c < cols_; ++c)
            for (auto& [i, x] : col_[c]) r.col_[i][c] = x;
        return r;
    }
    friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.col_ == b.col_;
    }

private:
    void check(int r, int c) const {
        if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw std::out_of_range("matrix index out of range");
    }
    int rows_ = 0, cols_ = 0;
    std::vector<SparseVec<C>> col_;
};

using SparseMatrixQ = SparseMatrix<Rational>;
using SparseMatrixP = SparseMatrix<PolyQ>;

// h^k coefficient of a polynomial matrix.
inline SparseMatrixQ coefficient(const SparseMatrixP& m, std::size_t k) {
    SparseMatrixQ r(m.rows(), m.cols());
    for (int c = 0; c < m.cols(); ++c)
        for (auto& [i, p] : m.column(c)) r.add(i, c, p.coeff(k));
    return r;
}
inline int max_degree(const SparseMatrixP& m) {
    int d = -1;
    for (int c = 0; c < m.cols(); ++c)
        for (auto& [i, p] : m.column(c)) d = std::max(d, p.degree());
    return d;
}
inline SparseMatrixQ evaluate(const SparseMatrixP& m, const Rational& h) {
    SparseMatrixQ r(m.rows(), m.cols());
    for (int c = 0; c < m.cols(); ++c)
        for (auto& [i, p] : m.column(c)) r.add(i, c, p.eval(h));
    return r;
}

// Text form: "rows cols nnz" then one "row col p/q" line per entry, column-major.
inline void dump(std::ostream& os, const SparseMatrixQ& m) {
    os << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
    for (int c = 0; c < m.cols(); ++c)
        for (auto& [r, x] : m.column(c)) os << r << ' ' << c << ' ' << x.get_str() << '\n';
}
inline std::string dump(const SparseMatrixQ& m) {
    std::ostringstream os;
    dump(os, m);
    return os.str();
}
inline SparseMatrixQ parse_matrix(std::istream& is) {
    int rows, cols;
    std::size_t nnz;
    if (!(is >> rows >> cols >> nnz)) throw std::invalid_argument("bad matrix header");
    SparseMatrixQ m(rows, cols);
    for (std::size_t k = 0; k < nnz; ++k) {
        int r, c;
        std::string v;
        if (!(is >> r >> c >> v)) throw std::invalid_argument("truncated matrix entry list");
        m.add(r, c, parse_rational(v));
    }
    return m;
}

namespace detail {

using IVec = std::vector<std::pair<int, Integer>>;  // sorted by index

inline IVec integerize(const SparseVecQ& v, Integer* scale = nullptr) {
    Integer l = 1;
    for (auto& [i, x] : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    IVec out;
    out.reserve(v.size());
    for (auto& [i, x] : v) out.emplace_back(i, Integer(x.get_num() * (l / x.get_den())));
    if (scale) *scale = l;
    return out;
}

inline Integer content(const IVec& v) {
    Integer g = 0;
    for (auto& [i, x] : v) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 1) break;
    }
    return g;
}

// a*u - b*w, merged by index
inline IVec combine(const Integer& a, const IVec& u, const Integer& b, const IVec& w) {
    IVec out;
    out.reserve(u.size() + w.size());
    std::size_t i = 0, j = 0;
    while (i < u.size() || j < w.size()) {
        if (j == w.size() || (i < u.size() && u[i].first < w[j].first)) {
            out.emplace_back(u[i].first, Integer(a * u[i].second));
            ++i;
        } else if (i == u.size() || w[j].first < u[i].first) {
            out.emplace_back(w[j].first, Integer(-b * w[j].second));
            ++j;
        } else {
            Integer x = a * u[i].second - b * w[j].second;
            if (x != 0) out.emplace_back(u[i].first, std::move(x));
            ++i;
            ++j;
        }
    }
    return out;
}

inline SparseVecQ combine_q(const Rational& a, const SparseVecQ& u, const Rational& b, const SparseVecQ& w) {
    SparseVecQ out;
    for (auto& [i, x] : u) sv_add(out, i, Rational(a * x));
    for (auto& [i, x] : w) sv_add(out, i, Rational(-b * x));
    return out;
}

}  // namespace detail

// Incremental exact echelon basis (fraction-free, content removed).
// Pivoting is deterministic: vectors in insertion order, smallest row index first.
class Eliminator {
public:
    explicit Eliminator(int dim, bool track = true) : dim_(dim), track_(track), pivot_at_(static_cast<std::size_t>(dim), -1) {}

    int dim() const { return dim_; }
    int rank() const { return static_cast<int>(piv_.size()); }

    // Returns true if v was independent of everything added before.
    bool add(const SparseVecQ& v) {
        int tag = added_++;
        check(v);
        Integer s;
        Row row{detail::integerize(v, &s), {}};
        if (track_) row.combo[tag] = Rational(s);
        reduce(row);
        if (row.vec.empty()) {
            if (track_) deps_.push_back(row.combo);
            return false;
        }
        pivot_at_[row.vec.front().first] = static_cast<int>(piv_.size());
        piv_.push_back(std::move(row));
        return true;
    }

    bool contains(const SparseVecQ& v) const {
        check(v);
        Row row{detail::integerize(v), {}};
        reduce_no_track(row);
        return row.vec.empty();
    }

    // Coefficients w over added vectors with sum_j w_j v_j = v, if v is in the span.
    std::optional<SparseVecQ> solve(const SparseVecQ& v) const {
        if (!track_) throw std::logic_error("Eliminator::solve needs tracking");
        check(v);
        Integer s;
        Row row{detail::integerize(v, &s), {}};
        const int self = -1;
        row.combo[self] = Rational(s);
        reduce(row);
        if (!row.vec.empty()) return std::nullopt;
        Rational alpha = row.combo[self];
        row.combo.erase(self);
        SparseVecQ w;
        for (auto& [j, c] : row.combo) sv_add(w, j, Rational(-c / alpha));
        return w;
    }

    // Linear relations among the added vectors that reduced to zero.
    const std::vector<SparseVecQ>& dependencies() const { return deps_; }

private:
    struct Row {
        detail::IVec vec;
        SparseVecQ combo;
    };

    void check(const SparseVecQ& v) const {
        if (!v.empty() && (v.begin()->first < 0 || v.rbegin()->first >= dim_))
            throw std::invalid_argument("vector dimension mismatch");
    }

    void reduce(Row& row) const {
        while (!row.vec.empty()) {
            int r = row.vec.front().first;
            int p = pivot_at_[r];
            if (p < 0) break;
            const Row& P = piv_[p];
            Integer a = P.vec.front().second, b = row.vec.front().second;
            Integer g;
            mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
            a /= g;
            b /= g;
            row.vec = detail::combine(a, row.vec, b, P.vec);
            Integer c = detail::content(row.vec);
            if (c > 1)
                for (auto& e : row.vec) mpz_divexact(e.second.get_mpz_t(), e.second.get_mpz_t(), c.get_mpz_t());
            if (track_) {
                row.combo = detail::combine_q(Rational(a), row.combo, Rational(b), P.combo);
                if (c > 1)
                    for (auto& e : row.combo) e.second /= Rational(c);
            }
        }
        if (!row.vec.empty() && row.vec.front().second < 0) {
            for (auto& e : row.vec) e.second = -e.second;
            for (auto& e : row.combo) e.second = -e.second;
        }
    }
    void reduce_no_track(Row& row) const {
        while (!row.vec.empty()) {
            int p = pivot_at_[row.vec.front().first];
            if (p < 0) break;
            const Row& P = piv_[p];
            Integer a = P.vec.front().second, b = row.vec.front().second, g;
            mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
            row.vec = detail::combine(Integer(a / g), row.vec, Integer(b / g), P.vec);
            Integer c = detail::content(row.vec);
            if (c > 1)
                for (auto& e : row.vec) mpz_divexact(e.second.get_mpz_t(), e.second.get_mpz_t(), c.get_mpz_t());
        }
    }

    int dim_;
    bool track_;
    int added_ = 0;
    std::vector<int> pivot_at_;
    std::vector<Row> piv_;
    std::vector<SparseVecQ> deps_;
};

namespace detail {

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1;
    b %= p;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

// Rank mod p; nullopt when some denominator vanishes mod p.
inline std::optional<int> rank_mod(const SparseMatrixQ& m, std::uint64_t p) {
    using MVec = std::vector<std::pair<int, std::uint64_t>>;
    std::vector<int> pivot_at(static_cast<std::size_t>(m.rows()), -1);
    std::vector<MVec> piv;
    for (int c = 0; c < m.cols(); ++c) {
        MVec v;
        for (auto& [r, x] : m.column(c)) {
            std::uint64_t den = mpz_fdiv_ui(x.get_den_mpz_t(), p);
            if (den == 0) return std::nullopt;
            std::uint64_t num = mpz_fdiv_ui(x.get_num_mpz_t(), p);
            std::uint64_t val = num * powmod(den, p - 2, p) % p;
            if (val) v.emplace_back(r, val);
        }
        while (!v.empty()) {
            int pi = pivot_at[v.front().first];
            if (pi < 0) break;
            const MVec& P = piv[pi];  // leading coefficient 1
            std::uint64_t f = v.front().second;
            MVec out;
            out.reserve(v.size() + P.size());
            std::size_t i = 0, j = 0;
            while (i < v.size() || j < P.size()) {
                if (j == P.size() || (i < v.size() && v[i].first < P[j].first)) {
                    out.push_back(v[i++]);
                } else if (i == v.size() || P[j].first < v[i].first) {
                    out.emplace_back(P[j].first, (p - f * P[j].second % p) % p);
                    ++j;
                } else {
                    std::uint64_t x = (v[i].second + p - f * P[j].second % p) % p;
                    if (x) out.emplace_back(v[i].first, x);
                    ++i;
                    ++j;
                }
            }
            v.swap(out);
        }
        if (v.empty()) continue;
        std::uint64_t inv = powmod(v.front().second, p - 2, p);
        for (auto& e : v) e.second = e.second * inv % p;
        pivot_at[v.front().first] = static_cast<int>(piv.size());
        piv.push_back(std::move(v));
    }
    return static_cast<int>(piv.size());
}

}  // namespace detail

enum class RankMode { Exact, Modular, Verify };

// Fixed 31-bit primes used by the modular path.
inline const std::vector<std::uint64_t>& rank_primes() {
    static const std::vector<std::uint64_t> ps{2147483647ULL, 2147483629ULL};
    return ps;
}

inline int rank_exact(const SparseMatrixQ& m) {
    Eliminator e(m.rows(), false);
    for (int c = 0; c < m.cols(); ++c) e.add(m.column(c));
    return e.rank();
}

// Modular rank over all fixed primes; falls back to the exact path if they disagree.
inline int rank_modular(const SparseMatrixQ& m) {
    std::optional<int> agreed;
    for (auto p : rank_primes()) {
        auto r = detail::rank_mod(m, p);
        if (!r || (agreed && *agreed != *r)) return rank_exact(m);
        agreed = r;
    }
    return *agreed;
}

inline RankMode& default_rank_mode() {
    static RankMode mode = RankMode::Modular;
    return mode;
}

inline int rank(const SparseMatrixQ& m, RankMode mode = default_rank_mode()) {
    switch (mode) {
        case RankMode::Exact:
            return rank_exact(m);
        case RankMode::Modular:
            return rank_modular(m);
        case RankMode::Verify: {
            int a = rank_exact(m), b = rank_modular(m);
            if (a != b) throw std::runtime_error("modular and exact rank disagree");
            return a;
        }
    }
    return rank_exact(m);
}

// Scale a rational vector to a primitive integer vector with positive leading entry.
inline SparseVecQ primitive(const SparseVecQ& v) {
    if (v.empty()) return v;
    auto iv = detail::integerize(v);
    Integer c = detail::content(iv);
    if (iv.front().second < 0) c = -c;
    SparseVecQ out;
    for (auto& [i, x] : iv) out.emplace(i, Rational(x / c));
    return out;
}

// Exact basis of ker m, primitive integer vectors.
inline std::vector<SparseVecQ> kernel_basis(const SparseMatrixQ& m) {
    Eliminator e(m.rows(), true);
    for (int c = 0; c < m.cols(); ++c) e.add(m.column(c));
    std::vector<SparseVecQ> out;
    for (auto& d : e.dependencies()) out.push_back(primitive(d));
    return out;
}

// Witness w with m w = v, or nullopt.
inline std::optional<SparseVecQ> in_image(const SparseMatrixQ& m, const SparseVecQ& v) {
    if (!v.empty() && (v.begin()->first < 0 || v.rbegin()->first >= m.rows()))
        throw std::invalid_argument("in_image: vector dimension mismatch");
    Eliminator e(m.rows(), true);
    for (int c = 0; c < m.cols(); ++c) e.add(m.column(c));
    return e.solve(v);
}

inline SparseVecQ to_sparse(const std::vector<Rational>& v) {
    SparseVecQ out;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!is_zero(v[i])) out.emplace(static_cast<int>(i), v[i]);
    return out;
}

}  // namespace kmcoh
