// Smallest weighted singular value of two Toeplitz families as the window
// grows: 2 + e^{-i xi} stays away from zero, 1 - e^{-i xi} does not.

#include "wiener/wiener_lab.hpp"

#include <cstdio>

int main() {
  using namespace wiener;
  SymbolCoeffs good, bad;
  good.coeffs[{0}] = 2.0;
  good.coeffs[{1}] = 1.0;
  bad.coeffs[{0}] = 1.0;
  bad.coeffs[{1}] = -1.0;

  for (const auto* sym : {&good, &bad}) {
    const auto mm = certify_min_modulus(*sym);
    std::printf("symbol min |a| = %.6f (%s)\n", mm.min,
                mm.certified ? "certified > 0" : mm.vanishing ? "vanishes" : "undecided");
    for (const char* w : {"trivial", "power:1"}) {
      std::printf("  weight %-8s", w);
      for (int R : {16, 32, 64, 128}) {
        const Window win(1, R);
        const auto rep = stability_bracket(toeplitz_matrix(*sym, win), 2.0, io::parse_weight_sequence(w, win));
        std::printf("  R=%-3d %.4f", R, rep.lower);
      }
      std::printf("\n");
    }
  }
}
