// Inverts A = 2I + S on growing windows and prints how the inverse's decay
// profile and Beurling norm settle as the window grows.

#include "wiener/wiener_lab.hpp"

#include <cstdio>

int main() {
  using namespace wiener;
  SymbolCoeffs a;
  a.d = 1;
  a.coeffs[{0}] = 2.0;
  a.coeffs[{1}] = 1.0;

  std::printf("%6s %8s %6s %22s %12s\n", "R", "r0", "K", "||A^-1||_B", "h(10)");
  for (int R : {8, 16, 32, 64, 128}) {
    const auto A = toeplitz_matrix(a, Window(1, R));
    auto [Ainv, rep] = wiener_invert(A);
    std::printf("%6d %8.4f %6d %22.15f %12.3e\n", R, rep.r0, rep.terms_used, rep.inverse_beurling_norm,
                rep.inverse_profile[10]);
  }
  std::printf("expected: h(n) = 2^{-n-1}, h(10) = %.3e\n", 1.0 / 2048.0);
}
