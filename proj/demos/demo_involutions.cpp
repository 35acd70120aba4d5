// Exact involution statistics: the chi table, the expected-trace closed form,
// and its square-root growth.
#include <iostream>

#include "permrep/fe_series.hpp"
#include "permrep/homcount.hpp"

int main() {
    using namespace permrep;
    const FreeProduct c2 = parse_group_spec("C2");
    const NormalForm x = c2.parse_word("x");

    CountTable table(FiniteGroup::cyclic(2), 20);
    std::cout << "chi_n(C2) = # involutions in Sym(n):\n  ";
    for (unsigned n = 0; n <= 10; ++n) std::cout << table.chi(n) << " ";
    std::cout << "\n\nE[tr phi_N(x)] = N a_{N-1}/a_N:\n";
    for (unsigned n : {4u, 16u, 64u, 256u}) {
        const Rat fix = expected_fix_torsion(c2, x, n);
        std::cout << "  N=" << n << ": " << fix << " ~ " << to_real(fix).str(6)
                  << " (sqrt(N) = " << sqrt(Real(n)).str(6) << ")\n";
    }

    std::vector<unsigned> grid;
    for (unsigned n = 10000; n >= 16; n /= 2) grid.push_back(n);
    const auto fixes = expected_fix_torsion_multi(c2, x, grid);
    std::vector<std::pair<std::uint64_t, Real>> points;
    for (const auto& [n, fix] : fixes) points.push_back({n, to_real(fix) / sqrt(Real(n))});
    const FitReport fit = fe_fit(points, 2, 5);
    std::cout << "\nfractional expansion of N^{-1/2} E[tr phi_N(x)] (q = 2):\n  ";
    for (const auto& c : fit.series.coeffs) std::cout << c.str(8) << " ";
    std::cout << "\n";
}
