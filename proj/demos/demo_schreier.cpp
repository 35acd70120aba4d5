// Sample a random 3-regular Schreier graph of C2*C3 and report its gap.
#include <iostream>

#include "permrep/spectra.hpp"
#include "permrep/walks.hpp"

int main() {
    using namespace permrep;
    const FreeProduct fp = parse_group_spec("C2*C3");
    FreeProductSampler sampler(fp, 2000);
    const HomImage phi = sampler.sample(2000, 42);
    const SparseGraph graph = build_schreier(
        fp, phi, {fp.parse_word("x"), fp.parse_word("y"), fp.parse_word("y2")});
    const SpectralReport report = spectral_gap(graph);
    const LimitNorm limit = limit_norm_constants("c2c3");
    std::cout << "N = " << graph.n << ", degree " << graph.degree << "\n"
              << "||A|_{1perp}|| = " << report.top_norm << " (" << report.method << ")\n"
              << "limit constant  = " << limit.norm << "\n"
              << "Ramanujan bound = " << 2 * std::sqrt(2.0) << "\n";
}
