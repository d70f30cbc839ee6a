// Decide a few states and print the outcome.

#include <cstdio>

#include "gaussep/gaussep.hpp"

int main() {
  using namespace gaussep;

  struct Case {
    const char* name;
    BipartiteCM state;
  };
  const Case cases[] = {
      {"vacuum", vacuum(1, 1)},
      {"tmss r=1", tmss(1.0)},
      {"tmss r=1 + 0.9*I", shifted(tmss(1.0), 0.9)},
      {"random separable 2x2", random_separable(2, 2, 11).gamma},
  };

  for (const Case& c : cases) {
    const Verdict v = decide(c.state);
    std::printf("%-22s %-10s step %d  margin %+.3e\n", c.name, to_string(v.kind), v.step,
                v.margin);
    if (v.kind == VerdictKind::separable) {
      const CertificateCheck chk = verify_certificate(c.state, reconstruct(v));
      std::printf("%22s certificate %s, margins %.2e %.2e %.2e\n", "", chk.valid ? "ok" : "FAILED",
                  chk.margins[0], chk.margins[1], chk.margins[2]);
    }
  }

  const ThresholdResult t = find_threshold(tmss(1.0), RMat::Identity(4, 4));
  std::printf("tmss r=1 threshold for added white noise: %.12f\n", t.value);
  return 0;
}
