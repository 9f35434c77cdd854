// Prints relative cohomology dimensions of the critical sl2 vacuum next to the oper-side series.
#include "kmcoh/chevalley.hpp"
#include "kmcoh/opers.hpp"

#include <iostream>

using namespace kmcoh;

int main() {
    const int maxE = 6, maxP = 1;
    auto L = build_simple_lie_algebra("sl2");
    LoopModule<Rational> V(L, ModuleKind::Vacuum, Flavor::Quantum, critical_form(L));
    ChevalleyComplex<Rational> X(V, PairKind::VacuumRelative);
    auto oracle = hilbert_series(SeriesLabel::OmegaOp, L, maxE, maxP);
    for (int p = 0; p <= maxP; ++p) {
        std::cout << "H^" << p << " :";
        for (int E = 0; E <= maxE; ++E) std::cout << " " << cohomology(X, p, E, {0}).dim;
        std::cout << "\nOp^" << p << ":";
        for (int E = 0; E <= maxE; ++E) std::cout << " " << oracle.coeff[p][E];
        std::cout << "\n";
    }
}
