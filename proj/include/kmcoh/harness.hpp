#pragma once

#include "kmcoh/chevalley.hpp"
#include "kmcoh/deformation.hpp"
#include "kmcoh/opers.hpp"
#include "kmcoh/vertex_layer.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace kmcoh {

// Bad configuration; distinct from a verification mismatch.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{
        "classical-vacuum", "quantum-vacuum-critical", "quantum-vacuum-generic", "classical-verma",
        "quantum-verma-critical", "quantum-verma-generic", "vertex-identities", "deformation",
        "oper-roundtrip", "absolute-vs-relative"};
    return names;
}

struct LevelSpec {
    bool critical = true;
    Rational h = 0;  // kappa = kappa_c + h kappa0 when not critical
};

inline LevelSpec parse_level(const std::string& s) {
    if (s == "critical") return {};
    if (s.rfind("generic:", 0) == 0) {
        Rational h;
        try {
            h = parse_rational(s.substr(8));
        } catch (const std::exception&) {
            throw ConfigError("bad level: " + s);
        }
        if (is_zero(h)) throw ConfigError("generic:0 is the critical level");
        return {false, h};
    }
    throw ConfigError("level must be critical or generic:H, got " + s);
}

inline std::vector<Rational> parse_weight(const std::string& s) {
    std::vector<Rational> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        Rational x;
        try {
            x = parse_rational(part);
        } catch (const std::exception&) {
            throw ConfigError("bad weight component: " + part);
        }
        if (x.get_den() != 1) throw ConfigError("Verma weight must be integral, got " + part);
        out.push_back(x);
    }
    return out;
}

struct SuiteConfig {
    std::string algebra = "sl2";
    std::string suite;
    int max_energy = 4;
    int max_degree = 2;
    std::optional<LevelSpec> level;           // generic suites default to h = 1
    std::optional<std::vector<Rational>> weight;  // Verma suites default to 0
    int precision = 4;                        // oper suites
    std::string output;
};

inline void validate(const SuiteConfig& c) {
    auto& n = suite_names();
    if (std::find(n.begin(), n.end(), c.suite) == n.end()) throw ConfigError("unknown suite: " + c.suite);
    if (c.algebra != "sl2" && c.algebra != "sl3") throw ConfigError("algebra must be sl2 or sl3, got " + c.algebra);
    if (c.max_energy < 0 || c.max_degree < 0) throw ConfigError("cutoffs must be non-negative");
    if (c.precision < 1) throw ConfigError("precision must be positive");
    bool verma = c.suite.find("verma") != std::string::npos;
    if (c.weight) {
        if (!verma) throw ConfigError("--weight only applies to Verma suites");
        int rank = c.algebra == "sl2" ? 1 : 2;
        if (static_cast<int>(c.weight->size()) != rank) throw ConfigError("weight needs " + std::to_string(rank) + " components");
        for (auto& x : *c.weight)
            if (x.get_den() != 1) throw ConfigError("Verma weight must be integral");
    }
    if (c.level) {
        bool generic = c.suite.find("generic") != std::string::npos;
        bool critical = c.suite.find("critical") != std::string::npos;
        if (generic && c.level->critical) throw ConfigError(c.suite + " needs a generic level");
        if (critical && !c.level->critical) throw ConfigError(c.suite + " is fixed at the critical level");
        if (!generic && !critical) throw ConfigError("--level does not apply to " + c.suite);
    }
}

// One line of a report. Slices carry cohomology dimensions; identity checks carry
// (passed, total) in (dim, expected) and p = -1 when no cohomological degree applies.
struct ReportRecord {
    std::string pair, module;
    int p = 0, energy = 0;
    RootWeight weight;
    long dim = 0, expected = 0;
    bool match = false;
};

inline bool operator<(const ReportRecord& a, const ReportRecord& b) {
    return std::tie(a.module, a.pair, a.p, a.energy, a.weight) < std::tie(b.module, b.pair, b.p, b.energy, b.weight);
}

struct SuiteReport {
    SuiteConfig config;
    std::vector<ReportRecord> records;  // canonically sorted
    bool passed() const {
        return std::all_of(records.begin(), records.end(), [](const ReportRecord& r) { return r.match; });
    }
    long mismatches() const {
        return std::count_if(records.begin(), records.end(), [](const ReportRecord& r) { return !r.match; });
    }
    // every record whose module starts with prefix matches, and there is at least one
    bool all_match(const std::string& prefix) const {
        bool any = false;
        for (auto& r : records)
            if (r.module.rfind(prefix, 0) == 0) {
                any = true;
                if (!r.match) return false;
            }
        return any;
    }
    long total(const std::string& prefix) const {
        long t = 0;
        for (auto& r : records)
            if (r.module.rfind(prefix, 0) == 0) t += r.expected;
        return t;
    }
};

namespace detail {

inline RootWeight zero_weight(const SimpleLieAlgebra& L) { return RootWeight(static_cast<std::size_t>(L.rank), 0); }

inline BilinearFormQ zero_form(const SimpleLieAlgebra& L) {
    return {"zero", std::vector<std::vector<Rational>>(L.dim, std::vector<Rational>(L.dim, Rational(0)))};
}

// Accumulates pass counts of identity checks keyed by (check, pair, p, energy).
class Tally {
public:
    void add(const std::string& check, const std::string& pair, int p, int E, bool ok) {
        auto& [pass, total] = t_[{check, pair, p, E}];
        ++total;
        if (ok) ++pass;
    }
    void append(std::vector<ReportRecord>& out) const {
        for (auto& [k, v] : t_) {
            auto& [check, pair, p, E] = k;
            out.push_back({pair, check, p, E, {}, v.first, v.second, v.first == v.second});
        }
    }

private:
    std::map<std::tuple<std::string, std::string, int, int>, std::pair<long, long>> t_;
};

struct ComplexSetup {
    LoopModule<Rational> M;
    ChevalleyComplex<Rational> X;
    ComplexSetup(const SimpleLieAlgebra& L, ModuleKind kind, Flavor fl, BilinearFormQ k, PairKind pair,
                 std::vector<Rational> lambda = {})
        : M(L, kind, fl, std::move(k), std::move(lambda)), X(M, pair) {}
};

// expected(p, E) against the computed slice; empty slices with expected 0 are left out
template <class F>
void slice_records(ChevalleyComplex<Rational>& X, const std::string& module, int maxE, int maxP, F expected,
                   std::vector<ReportRecord>& out) {
    RootWeight w = zero_weight(X.module().algebra());
    for (int p = 0; p <= maxP; ++p)
        for (int E = 0; E <= maxE; ++E) {
            CohomologyReport r = cohomology(X, p, E, w);
            long want = expected(p, E);
            if (r.cochain_dim == 0 && want == 0) continue;
            out.push_back({to_string(X.pair()), module, p, E, w, r.dim, want, r.dim == want});
        }
}

inline std::function<long(int, int)> series_oracle(SeriesLabel label, const SimpleLieAlgebra& L, int maxE, int maxP) {
    auto h = hilbert_series(label, L, maxE, maxP);
    return [h](int p, int E) { return h.coeff[p][E]; };
}

inline long trivial_oracle(int p, int E) { return p == 0 && E == 0 ? 1 : 0; }

inline BilinearFormQ level_form(const SimpleLieAlgebra& L, const SuiteConfig& c) {
    LevelSpec lv = c.level.value_or(LevelSpec{false, Rational(1)});
    return lv.critical ? critical_form(L) : family_form(L, lv.h);
}

inline std::vector<Rational> verma_weight(const SimpleLieAlgebra& L, const SuiteConfig& c) {
    return c.weight.value_or(std::vector<Rational>(static_cast<std::size_t>(L.rank), Rational(0)));
}

// top PBW-length part of a cochain
inline Cochain<Rational> leading_symbol(const Cochain<Rational>& z) {
    std::size_t len = 0;
    for (auto& [k, c] : z) len = std::max(len, k.second.size());
    Cochain<Rational> out;
    for (auto& [k, c] : z)
        if (k.second.size() == len) out.emplace(k, c);
    return out;
}

// Sugawara vector and lifted-generator classes on the critical vacuum.
inline void critical_vacuum_extras(const SimpleLieAlgebra& L, ChevalleyComplex<Rational>& X, int maxE, int maxP,
                                   std::vector<ReportRecord>& out) {
    Tally t;
    RootWeight w = zero_weight(L);
    const std::string pair = to_string(X.pair());
    if (maxE >= 2) {
        auto r = cohomology(X, 0, 2, w, true);
        bool ok = r.dim == 1;
        if (ok) {
            auto el = classical_invariant(L, invariant_polynomials(L)[0].poly, 0, ModuleKind::Vacuum);
            Cochain<Rational> c;
            for (auto& [m, x] : el) cochain_add(c, CochainKey{{}, m}, x);
            auto sym = leading_symbol(X.to_cochain(0, 2, w, r.representatives[0]));
            ok = primitive(X.to_vector(0, 2, w, sym)) == primitive(X.to_vector(0, 2, w, c));
        }
        t.add("sugawara-energy2", pair, 0, 2, ok);
    }
    if (maxP >= 1) {
        FamilyDifferential Q(L, ModuleKind::Vacuum, Flavor::Quantum, PairKind::VacuumRelative);
        FamilyDifferential C(L, ModuleKind::Vacuum, Flavor::Classical, PairKind::VacuumRelative);
        for (int E = 1; E <= maxE; ++E) {
            auto f = phi_map(Q, 0, E, w);
            if (f.source.empty()) continue;
            // (H(delta0), phi) is exact away from energy 0, so every class has nonzero image
            t.add("phi-lift-nonzero", pair, 0, E, rank(f.matrix) == static_cast<int>(f.source.size()));
            for (auto& v : f.source) {
                Cochain<Rational> z = Q.base().to_cochain(0, E, w, v);
                auto sym = leading_symbol(z);
                std::size_t len = sym.begin()->first.second.size();
                Cochain<Rational> q = Q.apply(1, z), top;
                bool bounded = true;
                for (auto& [k, c] : q) {
                    if (k.second.size() + 1 > len) bounded = false;
                    if (k.second.size() + 1 == len) top.emplace(k, c);
                }
                Cochain<Rational> cl = C.apply(1, sym);
                t.add("phi-lift-symbol", pair, 0, E, bounded && !cl.empty() && top == cl);
            }
        }
    }
    t.append(out);
}

inline std::vector<CochainKey> states_upto(VertexAlgebra& VA, int rank, int E) {
    std::vector<CochainKey> out;
    for (int e = 0; e <= E; ++e)
        for (int p = 0; p <= 3 * (e + 1) * (rank == 1 ? 1 : 3); ++p) {
            int bound = 2 * e + p + 2;
            RootWeight w(static_cast<std::size_t>(rank), -bound);
            while (true) {
                for (auto& k : VA.complex().cochain_basis(p, e, w)) out.push_back(k);
                std::size_t i = 0;
                while (i < w.size() && w[i] == bound) w[i++] = -bound;
                if (i == w.size()) break;
                ++w[i];
            }
        }
    return out;
}

inline int sign(int e) { return e % 2 ? -1 : 1; }

inline void vertex_suite(const SimpleLieAlgebra& L, int maxE, std::vector<ReportRecord>& out) {
    LoopModule<Rational> V(L, ModuleKind::Vacuum, Flavor::Quantum, critical_form(L));
    VertexAlgebra VA(V);
    Tally t;
    const std::string abs = to_string(PairKind::Absolute);
    auto S = states_upto(VA, L.rank, maxE);
    State vac = VertexAlgebra::vacuum();
    for (auto& k : S) {
        State A = state_of(k);
        bool ok = VA.cup(A, vac) == A && VA.cup(vac, A) == A;
        for (int n = 0; n <= maxE; ++n) ok = ok && VA.mode(A, n, vac).empty();
        t.add("vertex-vacuum-axiom", abs, -1, VA.energy(k), ok);
    }
    for (auto& A : S)
        for (auto& B : S) {
            int e = VA.energy(A) + VA.energy(B);
            if (e > maxE) continue;
            State a = state_of(A), b = state_of(B);
            bool ok = true;
            for (int n = -2; n <= e; ++n) {
                State rhs = VA.mode(VA.d(a), n, b);
                state_add(rhs, VA.mode(a, n, VA.d(b)), sign(VertexAlgebra::parity(A)));
                ok = ok && VA.d(VA.mode(a, n, b)) == rhs;
            }
            t.add("vertex-derivation", abs, -1, e, ok);
        }
    for (auto& k : S) {
        State x = state_of(k);
        bool ok = true;
        for (int a = 0; a < L.dim; ++a)
            for (int b = 0; b < L.dim; ++b)
                for (int n = 0; n <= maxE; ++n)
                    for (int m = 0; m <= maxE; ++m) {
                        State s = VertexAlgebra::psi(a, n, VertexAlgebra::psi_star(b, m, x));
                        state_add(s, VertexAlgebra::psi_star(b, m, VertexAlgebra::psi(a, n, x)), 1);
                        State want;
                        if (a == b && n == m) want = x;
                        State ss = VertexAlgebra::psi_star(a, n, VertexAlgebra::psi_star(b, m, x));
                        state_add(ss, VertexAlgebra::psi_star(b, m, VertexAlgebra::psi_star(a, n, x)), 1);
                        ok = ok && s == want && ss.empty();
                    }
        t.add("vertex-clifford", abs, -1, VA.energy(k), ok);
    }
    // d Z(A,B) + Z(dA,B) + (-1)^{p(A)} Z(A,dB) = Y(A,B)
    auto defect = [&](int m, const CochainKey& A, const CochainKey& B) {
        State a = state_of(A), b = state_of(B);
        State lhs = VA.d(VA.Z(m, a, b));
        state_add(lhs, VA.Z(m, VA.d(a), b), 1);
        state_add(lhs, VA.Z(m, a, VA.d(b)), VertexAlgebra::parity(A) ? -1 : 1);
        state_add(lhs, VA.mode(a, m, b), -1);
        return lhs;
    };
    std::vector<CochainKey> gens;
    for (int k = 0; k <= 1; ++k)
        for (int a = 0; a < L.dim; ++a) {
            gens.push_back(VertexAlgebra::current(a, k));
            gens.push_back(VertexAlgebra::ghost(a, k));
        }
    for (auto& A : gens)
        for (auto& B : gens)
            for (int m = 0; m <= 3; ++m)
                t.add("vertex-homotopy-generators", abs, -1, VA.energy(A) + VA.energy(B), defect(m, A, B).empty());
    {
        std::vector<CochainKey> comp;
        for (auto& k : S)
            if (k.first.size() + k.second.size() >= 2 && VA.energy(k) < maxE) comp.push_back(k);
        if (!comp.empty()) {
            std::mt19937 rng(20240611);
            std::uniform_int_distribution<std::size_t> pick(0, comp.size() - 1), pickS(0, S.size() - 1);
            std::uniform_int_distribution<int> pm(0, 2);
            for (int total = 0; total < 120;) {
                auto A = comp[pick(rng)];
                auto B = S[pickS(rng)];
                int e = VA.energy(A) + VA.energy(B);
                if (e > maxE) continue;
                ++total;
                t.add("vertex-homotopy-composite", abs, -1, e, defect(pm(rng), A, B).empty());
            }
        }
    }
    // cup product on relative cohomology: skew-commutative up to coboundary
    LoopModule<Rational> V2(L, ModuleKind::Vacuum, Flavor::Quantum, critical_form(L));
    ChevalleyComplex<Rational> R(V2, PairKind::VacuumRelative);
    const std::string rel = to_string(PairKind::VacuumRelative);
    RootWeight w = zero_weight(L);
    struct Rep {
        int p, E;
        State s;
    };
    std::vector<Rep> reps;
    for (int p = 0; p <= 1; ++p)
        for (int E = 0; E <= maxE + 1; ++E)
            for (auto& v : cohomology(R, p, E, w, true).representatives) reps.push_back({p, E, R.to_cochain(p, E, w, v)});
    auto exact = [&](int p, int E, const State& x) {
        SparseVecQ v = R.to_vector(p, E, w, x);
        if (v.empty()) return true;
        if (p == 0) return false;
        auto img = R.differential_matrix(p - 1, E, w) * R.invariant_basis(p - 1, E, w);
        return in_image(img, v).has_value();
    };
    for (auto& A : reps)
        for (auto& B : reps) {
            State x = VA.cup(A.s, B.s);
            state_add(x, VA.cup(B.s, A.s), -sign(A.p * B.p));
            t.add("vertex-cup-skew", rel, A.p + B.p, A.E + B.E, exact(A.p + B.p, A.E + B.E, x));
        }
    t.append(out);
}

inline void deformation_suite(const SimpleLieAlgebra& L, int maxE, int maxP, const std::vector<Rational>& lambda,
                              std::vector<ReportRecord>& out) {
    Tally t;
    RootWeight w = zero_weight(L);
    struct Case {
        ModuleKind kind;
        Flavor flavor;
        PairKind pair;
    };
    for (auto c : {Case{ModuleKind::Vacuum, Flavor::Classical, PairKind::VacuumRelative},
                   Case{ModuleKind::Vacuum, Flavor::Quantum, PairKind::VacuumRelative},
                   Case{ModuleKind::Verma, Flavor::Classical, PairKind::VermaRelative},
                   Case{ModuleKind::Verma, Flavor::Quantum, PairKind::VermaRelative}}) {
        std::vector<Rational> lam;
        if (c.kind == ModuleKind::Verma) lam = lambda;
        FamilyDifferential F(L, c.kind, c.flavor, c.pair, lam);
        const std::string tag = ":" + to_string(c.flavor) + "-" + to_string(c.kind);
        const std::string pair = to_string(c.pair);
        for (int E = 0; E <= maxE; ++E)
            for (int p = 0; p <= maxP; ++p) {
                auto r = check_family_identities(F, p, E, w);
                t.add("family-square-zero" + tag, pair, p, E, r.square_zero);
                t.add("family-anticommute01" + tag, pair, p, E, r.anticommute01);
                t.add("family-delta1-square" + tag, pair, p, E, r.delta1_square);
                t.add("family-h-degree" + tag, pair, p, E, r.max_h_degree <= 1);
            }
        if (c.kind != ModuleKind::Vacuum) continue;
        for (int E = 0; E <= maxE; ++E)
            for (int p = 0; p + 1 <= maxP; ++p) {
                auto lo = phi_map(F, p, E, w), hi = phi_map(F, p + 1, E, w);
                t.add("phi-squared" + tag, pair, p, E, (hi.matrix * lo.matrix).is_zero());
            }
        for (int lam_s : {1, 3, -2})
            t.add("scaling-covariance" + tag, pair, -1, std::min(maxE, 4),
                  scaling_covariance_check(L, c.kind, c.flavor, c.pair, lam_s, std::min(maxE, 4), maxP));
    }
    // Leibniz for delta1 over the cup product, up to coboundary
    FamilyDifferential F(L, ModuleKind::Vacuum, Flavor::Quantum, PairKind::VacuumRelative);
    LoopModule<Rational> V(L, ModuleKind::Vacuum, Flavor::Quantum, critical_form(L));
    VertexAlgebra VA(V);
    auto& X = F.base();
    struct Rep {
        int p, E;
        State s;
    };
    std::vector<Rep> reps;
    for (int p = 0; p <= 1; ++p)
        for (int E = 0; E <= maxE; ++E)
            for (auto& v : cohomology(X, p, E, w, true).representatives) reps.push_back({p, E, X.to_cochain(p, E, w, v)});
    const std::string pair = to_string(PairKind::VacuumRelative);
    for (auto& A : reps)
        for (auto& B : reps) {
            int E = A.E + B.E, p = A.p + B.p + 1;
            if (E > maxE + 2) continue;
            State lhs = F.apply(1, VA.cup(A.s, B.s));
            state_add(lhs, VA.cup(F.apply(1, A.s), B.s), -1);
            state_add(lhs, VA.cup(A.s, F.apply(1, B.s)), A.p % 2 ? 1 : -1);
            SparseVecQ v = X.to_vector(p, E, w, lhs);
            bool ok = v.empty();
            if (!ok) {
                SparseMatrixQ img = X.differential_matrix(p - 1, E, w) * X.invariant_basis(p - 1, E, w);
                ok = in_image(img, v).has_value();
            }
            t.add("leibniz:quantum-vacuum", pair, p, E, ok);
        }
    t.append(out);
}

inline void oper_suite(const SimpleLieAlgebra& L, int maxE, int maxP, int K, std::vector<ReportRecord>& out) {
    Tally t;
    const std::string none = "none";
    auto T = principal_triple(L);
    std::mt19937 g(L.name == "sl2" ? 4101 : 4103);
    std::uniform_int_distribution<int> num(-5, 5), den(1, 3);
    auto rnd = [&] { return frac(num(g), den(g)); };
    auto gauge = [&](Singularity s) {
        GaugeElement x{K, s, {}};
        for (int a = 0; a < L.dim; ++a)
            if (L.in_nilpotent(a))
                for (int m = 0; m < K; ++m)
                    if (s == Singularity::RS || group_energy(L, a, m) < K) x.x[{a, m}] = rnd();
        x.x = drop_zeros(x.x);
        return x;
    };
    const int count = L.name == "sl2" ? 100 : 25;
    for (int it = 0; it < count; ++it) {
        CanonicalOper c{L.name, K, {}};
        for (std::size_t j = 0; j < T.degrees.size(); ++j)
            for (int m = 0; T.degrees[j] + 1 + m < K; ++m) c.c[{static_cast<int>(j), m}] = rnd();
        c.c = drop_zeros(c.c);
        OperRep op = gauge_transform(L, gauge(Singularity::Regular), to_oper(L, c));
        auto [can, x] = canonical_form(L, op);
        t.add("oper-roundtrip", none, -1, K, can.c == c.c && gauge_transform(L, x, op).v == to_oper(L, can).v);
    }
    for (int it = 0; it < 50; ++it) {
        OperRep op{L.name, K, Singularity::RS, {}};
        for (int a = 0; a < L.dim; ++a)
            if (L.in_borel(a))
                for (int m = 0; m < K; ++m) op.v[{a, m}] = rnd();
        op.v = drop_zeros(op.v);
        GaugeElement x = gauge(Singularity::RS), x0{K, Singularity::RS, {}};
        for (auto& [k, v] : x.x)
            if (k.second == 0) x0.x[k] = v;
        auto r = rs_residue(L, op);
        t.add("oper-residue-invariance", none, -1, K,
              rs_residue(L, gauge_transform(L, x0, op)) == r && rs_residue(L, gauge_transform(L, x, op)) == r);
    }
    for (auto [op_label, c_label] : {std::pair{SeriesLabel::FunOp, SeriesLabel::FunC}, std::pair{SeriesLabel::OmegaOp, SeriesLabel::OmegaC},
                                     std::pair{SeriesLabel::OmegaOpRS, SeriesLabel::OmegaCRS}}) {
        auto a = hilbert_series(op_label, L, maxE, maxP), b = hilbert_series(c_label, L, maxE, maxP);
        for (int p = 0; p <= maxP; ++p)
            for (int E = 0; E <= maxE; ++E)
                out.push_back({none, "series:" + to_string(op_label) + "=" + to_string(c_label), p, E, {}, a.coeff[p][E],
                               b.coeff[p][E], a.coeff[p][E] == b.coeff[p][E]});
    }
    t.append(out);
}

// Poincare polynomial of H(g): exterior generators in degrees 2 d_i + 1.
inline std::vector<long> lie_algebra_cohomology_poincare(const SimpleLieAlgebra& L) {
    std::vector<long> poly{1};
    for (auto& P : invariant_polynomials(L)) {
        int deg = 2 * P.exponent + 1;
        std::vector<long> next(poly.size() + static_cast<std::size_t>(deg), 0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + static_cast<std::size_t>(deg)] += poly[i];
        }
        poly = next;
    }
    return poly;
}

inline void absolute_suite(const SimpleLieAlgebra& L, int maxE, int maxP, std::vector<ReportRecord>& out) {
    ComplexSetup rel(L, ModuleKind::Vacuum, Flavor::Classical, zero_form(L), PairKind::VacuumRelative);
    ComplexSetup abs(L, ModuleKind::Vacuum, Flavor::Classical, zero_form(L), PairKind::Absolute);
    RootWeight w = zero_weight(L);
    slice_records(rel.X, "relative:classical-vacuum", maxE, maxP, series_oracle(SeriesLabel::OmegaC, L, maxE, maxP), out);
    auto lie = lie_algebra_cohomology_poincare(L);
    std::map<std::pair<int, int>, long> reldim;
    for (int p = 0; p <= maxP; ++p)
        for (int E = 0; E <= maxE; ++E) reldim[{p, E}] = cohomology(rel.X, p, E, w).dim;
    slice_records(abs.X, "absolute:classical-vacuum", maxE, maxP,
                  [&](int p, int E) {
                      long s = 0;
                      for (int k = 0; k < static_cast<int>(lie.size()) && k <= p; ++k) s += lie[k] * reldim[{p - k, E}];
                      return s;
                  },
                  out);
}

}  // namespace detail

// Runs one suite; throws ConfigError on a bad configuration.
inline SuiteReport run_suite(const SuiteConfig& cfg) {
    validate(cfg);
    SuiteReport rep;
    rep.config = cfg;
    auto L = build_simple_lie_algebra(cfg.algebra);
    const int N = cfg.max_energy, P = cfg.max_degree;
    auto& out = rep.records;
    using detail::ComplexSetup;
    const std::string& s = cfg.suite;
    if (s == "classical-vacuum") {
        ComplexSetup S(L, ModuleKind::Vacuum, Flavor::Classical, detail::zero_form(L), PairKind::VacuumRelative);
        detail::slice_records(S.X, "classical-vacuum", N, P, detail::series_oracle(SeriesLabel::OmegaC, L, N, P), out);
    } else if (s == "quantum-vacuum-critical") {
        ComplexSetup S(L, ModuleKind::Vacuum, Flavor::Quantum, critical_form(L), PairKind::VacuumRelative);
        detail::slice_records(S.X, "quantum-vacuum-critical", N, P, detail::series_oracle(SeriesLabel::OmegaC, L, N, P), out);
        detail::critical_vacuum_extras(L, S.X, N, P, out);
    } else if (s == "quantum-vacuum-generic") {
        ComplexSetup S(L, ModuleKind::Vacuum, Flavor::Quantum, detail::level_form(L, cfg), PairKind::VacuumRelative);
        detail::slice_records(S.X, "quantum-vacuum-generic", N, P, detail::trivial_oracle, out);
    } else if (s == "classical-verma") {
        ComplexSetup S(L, ModuleKind::Verma, Flavor::Classical, detail::zero_form(L), PairKind::VermaRelative,
                       detail::verma_weight(L, cfg));
        detail::slice_records(S.X, "classical-verma", N, P, detail::series_oracle(SeriesLabel::OmegaCRS, L, N, P), out);
    } else if (s == "quantum-verma-critical") {
        ComplexSetup S(L, ModuleKind::Verma, Flavor::Quantum, critical_form(L), PairKind::VermaRelative,
                       detail::verma_weight(L, cfg));
        detail::slice_records(S.X, "quantum-verma-critical", N, P, detail::series_oracle(SeriesLabel::OmegaCRS, L, N, P), out);
    } else if (s == "quantum-verma-generic") {
        ComplexSetup S(L, ModuleKind::Verma, Flavor::Quantum, detail::level_form(L, cfg), PairKind::VermaRelative,
                       detail::verma_weight(L, cfg));
        detail::slice_records(S.X, "quantum-verma-generic", N, P, detail::trivial_oracle, out);
    } else if (s == "vertex-identities") {
        detail::vertex_suite(L, N, out);
    } else if (s == "deformation") {
        detail::deformation_suite(L, N, P, detail::verma_weight(L, cfg), out);
    } else if (s == "oper-roundtrip") {
        detail::oper_suite(L, N, P, cfg.precision, out);
    } else if (s == "absolute-vs-relative") {
        detail::absolute_suite(L, N, P, out);
    }
    std::sort(out.begin(), out.end());
    return rep;
}

inline nlohmann::ordered_json to_json(const ReportRecord& r) {
    nlohmann::ordered_json j;
    j["pair"] = r.pair;
    j["module"] = r.module;
    j["p"] = r.p;
    j["energy"] = r.energy;
    j["weight"] = r.weight;
    j["dim"] = r.dim;
    j["expected"] = r.expected;
    j["match"] = r.match;
    return j;
}

inline std::string format_weight(const RootWeight& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
    return s;
}

enum class ReportFormat { Json, Tsv };

inline ReportFormat parse_report_format(const std::string& s) {
    if (s == "json") return ReportFormat::Json;
    if (s == "tsv") return ReportFormat::Tsv;
    throw ConfigError("format must be json or tsv, got " + s);
}

inline void emit_report(const std::vector<ReportRecord>& records, ReportFormat f, std::ostream& os) {
    if (f == ReportFormat::Json) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (auto& r : records) arr.push_back(to_json(r));
        os << arr.dump(1) << "\n";
        return;
    }
    os << "pair\tmodule\tp\tenergy\tweight\tdim\texpected\tmatch\n";
    for (auto& r : records)
        os << r.pair << '\t' << r.module << '\t' << r.p << '\t' << r.energy << '\t' << format_weight(r.weight) << '\t'
           << r.dim << '\t' << r.expected << '\t' << (r.match ? "true" : "false") << '\n';
}

inline std::vector<ReportRecord> parse_tsv_report(std::istream& is) {
    std::vector<ReportRecord> out;
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        std::stringstream ss(line);
        std::vector<std::string> f;
        std::string x;
        while (std::getline(ss, x, '\t')) f.push_back(x);
        if (f.size() == 7) f.insert(f.begin() + 4, "");
        if (f.size() != 8) throw std::invalid_argument("bad TSV row: " + line);
        ReportRecord r{f[0], f[1], std::stoi(f[2]), std::stoi(f[3]), {}, std::stol(f[5]), std::stol(f[6]), f[7] == "true"};
        std::stringstream ws(f[4]);
        while (std::getline(ws, x, ',')) r.weight.push_back(std::stoi(x));
        out.push_back(r);
    }
    return out;
}

inline std::vector<ReportRecord> parse_json_report(const nlohmann::json& j) {
    std::vector<ReportRecord> out;
    for (auto& e : j)
        out.push_back({e.at("pair"), e.at("module"), e.at("p"), e.at("energy"), e.at("weight").get<RootWeight>(), e.at("dim"),
                       e.at("expected"), e.at("match")});
    return out;
}

inline bool operator==(const ReportRecord& a, const ReportRecord& b) {
    return std::tie(a.pair, a.module, a.p, a.energy, a.weight, a.dim, a.expected, a.match) ==
           std::tie(b.pair, b.module, b.p, b.energy, b.weight, b.dim, b.expected, b.match);
}

// Human-readable summary: one line per record plus a verdict.
inline void print_table(const SuiteReport& r, std::ostream& os) {
    os << "suite " << r.config.suite << " on " << r.config.algebra << " (energy <= " << r.config.max_energy
       << ", degree <= " << r.config.max_degree << ")\n";
    os << "  module                                   pair       p  E   computed expected\n";
    for (auto& x : r.records) {
        std::string m = x.module;
        m.resize(std::max<std::size_t>(m.size(), 40), ' ');
        std::string pr = x.pair;
        pr.resize(std::max<std::size_t>(pr.size(), 10), ' ');
        os << "  " << m << " " << pr << " " << (x.p < 0 ? std::string(" -") : (x.p < 10 ? " " : "") + std::to_string(x.p))
           << " " << (x.energy < 10 ? " " : "") << x.energy << "  " << x.dim << "/" << x.expected << (x.match ? "" : "  MISMATCH")
           << "\n";
    }
    os << (r.passed() ? "PASS" : "FAIL") << ": " << r.records.size() - static_cast<std::size_t>(r.mismatches()) << " of "
       << r.records.size() << " records match\n";
}

}  // namespace kmcoh
