#pragma once

#include "kmcoh/chevalley.hpp"

#include <memory>
#include <stdexcept>
#include <vector>

namespace kmcoh {

struct LiftingFailure : std::logic_error {
    LiftingFailure() : std::logic_error("delta1 of a cocycle left the cocycles of delta0") {}
};

// Level of the family: quantum kappa_c + h s kappa0, classical h s kappa0 (s = scale).
inline BilinearForm<PolyQ> family_kappa(const SimpleLieAlgebra& L, Flavor flavor, const Rational& scale = 1) {
    BilinearFormQ base = flavor == Flavor::Quantum ? critical_form(L) : trace_form(L);
    BilinearFormQ K0 = trace_form(L);
    BilinearForm<PolyQ> F{"family(h)", std::vector<std::vector<PolyQ>>(L.dim, std::vector<PolyQ>(L.dim))};
    for (int a = 0; a < L.dim; ++a)
        for (int b = 0; b < L.dim; ++b) {
            F.m[a][b] = PolyQ::monomial(K0.m[a][b] * scale, 1);
            if (flavor == Flavor::Quantum) F.m[a][b] += PolyQ(base.m[a][b]);
        }
    return F;
}

// delta_h = delta0 + h delta1 + h^2 delta2 + ... on every slice of one pair.
// The h-free complex (h = 0) is kept alongside; both enumerate cochains in the same order.
class FamilyDifferential {
public:
    FamilyDifferential(const SimpleLieAlgebra& L, ModuleKind kind, Flavor flavor, PairKind pair,
                       std::vector<Rational> lambda = {}, const Rational& scale = 1)
        : flavor_(flavor), scale_(scale) {
        std::vector<PolyQ> lp(lambda.begin(), lambda.end());
        BilinearForm<PolyQ> kp = family_kappa(L, flavor, scale);
        BilinearFormQ k0{"h=0", std::vector<std::vector<Rational>>(L.dim, std::vector<Rational>(L.dim))};
        for (int a = 0; a < L.dim; ++a)
            for (int b = 0; b < L.dim; ++b) k0.m[a][b] = kp.m[a][b].coeff(0);
        mp_ = std::make_unique<LoopModule<PolyQ>>(L, kind, flavor, kp, lp);
        m0_ = std::make_unique<LoopModule<Rational>>(L, kind, flavor, k0, lambda);
        xp_ = std::make_unique<ChevalleyComplex<PolyQ>>(*mp_, pair);
        x0_ = std::make_unique<ChevalleyComplex<Rational>>(*m0_, pair);
    }

    Flavor flavor() const { return flavor_; }
    const Rational& scale() const { return scale_; }
    ChevalleyComplex<PolyQ>& family() { return *xp_; }
    ChevalleyComplex<Rational>& base() { return *x0_; }
    LoopModule<Rational>& base_module() { return *m0_; }

    SparseMatrixP delta(int p, int E, const RootWeight& w) { return xp_->differential_matrix(p, E, w); }
    // h^k component
    SparseMatrixQ component(int p, int E, const RootWeight& w, int k) { return coefficient(delta(p, E, w), static_cast<std::size_t>(k)); }

    // h^k component on a cochain
    Cochain<Rational> apply(int k, const Cochain<Rational>& x) {
        Cochain<Rational> out;
        for (auto& [key, c] : x)
            for (auto& [k2, pc] : xp_->d(key)) cochain_add(out, k2, Rational(pc.coeff(static_cast<std::size_t>(k)) * c));
        return out;
    }

private:
    Flavor flavor_;
    Rational scale_;
    std::unique_ptr<LoopModule<PolyQ>> mp_;
    std::unique_ptr<LoopModule<Rational>> m0_;
    std::unique_ptr<ChevalleyComplex<PolyQ>> xp_;
    std::unique_ptr<ChevalleyComplex<Rational>> x0_;
};

// [A, B]_+ for A: p+1 -> p+2, B: p -> p+1 and their swapped partners.
inline SparseMatrixQ anticommutator(const SparseMatrixQ& a_hi, const SparseMatrixQ& b_lo, const SparseMatrixQ& b_hi,
                                    const SparseMatrixQ& a_lo) {
    return a_hi * b_lo + b_hi * a_lo;
}

struct FamilyIdentities {
    bool square_zero = true;      // delta_h^2 = 0 in Q[h]
    bool anticommute01 = true;    // [delta0, delta1]_+ = 0
    bool delta1_square = true;    // delta1^2 = -[delta0, delta2]_+
    int max_h_degree = -1;
};

// Identities from delta_h^2 = 0 on the slice (p, E, w) -> (p + 2, E, w).
inline FamilyIdentities check_family_identities(FamilyDifferential& F, int p, int E, const RootWeight& w) {
    FamilyIdentities r;
    SparseMatrixP lo = F.delta(p, E, w), hi = F.delta(p + 1, E, w);
    r.max_h_degree = std::max(max_degree(lo), max_degree(hi));
    r.square_zero = (hi * lo).is_zero();
    auto c = [](const SparseMatrixP& m, int k) { return coefficient(m, static_cast<std::size_t>(k)); };
    r.anticommute01 = anticommutator(c(hi, 0), c(lo, 1), c(hi, 1), c(lo, 0)).is_zero();
    SparseMatrixQ d11 = c(hi, 1) * c(lo, 1);
    SparseMatrixQ d02 = anticommutator(c(hi, 0), c(lo, 2), c(hi, 2), c(lo, 0));
    r.delta1_square = (d11 + d02).is_zero();
    return r;
}

// phi^p : H^p(delta0) -> H^{p+1}(delta0) induced by delta1, in the representative bases.
struct PhiMap {
    int p = 0, energy = 0;
    RootWeight weight;
    std::vector<SparseVecQ> source;  // representatives of H^p
    std::vector<SparseVecQ> target;  // representatives of H^{p+1}
    SparseMatrixQ matrix;            // target.size() x source.size()
};

namespace detail {

// columns: target representatives, then the delta0-coboundaries of the slice
inline SparseMatrixQ class_frame(FamilyDifferential& F, int p, int E, const RootWeight& w,
                                 const std::vector<SparseVecQ>& reps) {
    auto& X = F.base();
    int n = static_cast<int>(X.cochain_basis(p, E, w).size());
    SparseMatrixQ img;
    if (p > 0) img = X.differential_matrix(p - 1, E, w) * X.invariant_basis(p - 1, E, w);
    int extra = p > 0 ? img.cols() : 0;
    SparseMatrixQ M(n, static_cast<int>(reps.size()) + extra);
    for (std::size_t i = 0; i < reps.size(); ++i) M.set_column(static_cast<int>(i), reps[i]);
    for (int c = 0; c < extra; ++c) M.set_column(static_cast<int>(reps.size()) + c, img.column(c));
    return M;
}

}  // namespace detail

// Coordinates of a delta0-cocycle in H^p, given the representatives; throws if not a cocycle class.
inline SparseVecQ class_of(FamilyDifferential& F, int p, int E, const RootWeight& w,
                           const std::vector<SparseVecQ>& reps, const SparseVecQ& v) {
    SparseMatrixQ M = detail::class_frame(F, p, E, w, reps);
    auto sol = in_image(M, v);
    if (!sol) throw LiftingFailure();
    SparseVecQ out;
    for (auto& [i, x] : *sol)
        if (i < static_cast<int>(reps.size())) out[i] = x;
    return out;
}

inline PhiMap phi_map(FamilyDifferential& F, int p, int E, const RootWeight& w) {
    PhiMap r;
    r.p = p;
    r.energy = E;
    r.weight = w;
    auto& X = F.base();
    r.source = cohomology(X, p, E, w, true).representatives;
    r.target = cohomology(X, p + 1, E, w, true).representatives;
    r.matrix = SparseMatrixQ(static_cast<int>(r.target.size()), static_cast<int>(r.source.size()));
    if (r.source.empty()) return r;
    SparseMatrixQ d1 = F.component(p, E, w, 1);
    for (std::size_t j = 0; j < r.source.size(); ++j) {
        SparseVecQ img = d1.apply(r.source[j]);
        if (img.empty()) continue;
        if (r.target.empty()) {
            // must then be a coboundary
            class_of(F, p + 1, E, w, r.target, img);
            continue;
        }
        r.matrix.set_column(static_cast<int>(j), class_of(F, p + 1, E, w, r.target, img));
    }
    return r;
}

// delta1 computed with lambda kappa0 equals lambda times delta1 with kappa0.
inline bool scaling_covariance_check(const SimpleLieAlgebra& L, ModuleKind kind, Flavor flavor, PairKind pair,
                                     const Rational& lambda, int max_energy, int max_degree,
                                     std::vector<Rational> weight_param = {}) {
    FamilyDifferential F1(L, kind, flavor, pair, weight_param, 1), Fl(L, kind, flavor, pair, weight_param, lambda);
    RootWeight w(static_cast<std::size_t>(L.rank), 0);
    for (int E = 0; E <= max_energy; ++E)
        for (int p = 0; p <= max_degree; ++p)
            if (!(Fl.component(p, E, w, 1) == F1.component(p, E, w, 1).scaled(lambda))) return false;
    return true;
}

}  // namespace kmcoh
