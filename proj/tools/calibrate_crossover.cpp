// Prints, for a set of solver-family parameters, the smallest |z_1| on a log
// grid where the series majorant needs more than kMaxSeriesShells shells at
// tol 1e-12, or exceeds the peak/term limits. mml_eval switches to the contour
// there. Usage: calibrate_crossover [points]

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "mtfrac/specfun.hpp"

using namespace mtfrac;

int main(int argc, char** argv) {
  const int points = argc > 1 ? std::atoi(argv[1]) : 400;
  const std::vector<FracOrders> sets{
      FracOrders({0.3}, {1.0}),           FracOrders({0.5}, {1.0}),           FracOrders({0.9}, {1.0}),
      FracOrders({0.7, 0.3}, {1.0, 1.0}), FracOrders({0.9, 0.3}, {1.0, 1.0}), FracOrders({0.5, 0.25}, {1.0, 2.0}),
      FracOrders({0.8, 0.5, 0.2}, {1.0, 0.5, 2.0}),
  };
  std::printf("%-24s %-6s %-14s %-14s %-8s\n", "alphas", "beta0", "shells>400", "dispatch", "shells@");
  for (const auto& o : sets) {
    for (double beta0 : {o.alpha_max(), 1.0, 1.0 + o.alpha_max()}) {
      const auto params = MLParams::solver_family(o, beta0);
      std::vector<double> radii(o.size());
      for (std::size_t j = 1; j < o.size(); ++j) radii[j] = o.q(j);
      double shells_cross = 0.0, dispatch_cross = 0.0;
      int shells_at = 0;
      for (double x : log_grid(1e-2, 1e4, points)) {
        radii[0] = x;
        const auto scan = detail::scan_majorant(beta0, params.betas, radii, 1e-12, 4 * kMaxSeriesShells);
        if (shells_cross == 0.0 && (!scan.converges || scan.shells > kMaxSeriesShells)) {
          shells_cross = x;
          shells_at = scan.shells;
        }
        std::vector<cplx> z(o.size());
        for (std::size_t j = 0; j < o.size(); ++j) z[j] = cplx(-radii[j], 0.0);
        if (dispatch_cross == 0.0 && !detail::series_preferred(beta0, params.betas, z)) dispatch_cross = x;
      }
      char label[64];
      int len = 0;
      for (double a : o.alphas()) len += std::snprintf(label + len, sizeof label - len, "%s%.2f", len ? "," : "", a);
      std::printf("%-24s %-6.2f %-14.4g %-14.4g %-8d\n", label, beta0, shells_cross, dispatch_cross, shells_at);
    }
  }
}
