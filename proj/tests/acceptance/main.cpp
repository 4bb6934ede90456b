#include <chrono>
#include <cstdio>
#include <cstring>
#include <exception>
#include <string>

#include "criteria.hpp"

namespace acceptance {

namespace {
std::string g_root = ".";
}

const std::string& root() { return g_root; }

}  // namespace acceptance

int main(int argc, char** argv) {
  using namespace acceptance;
  if (const char* r = std::getenv("CBC_SOURCE_DIR")) g_root = r;
  for (int k = 1; k < argc; ++k) {
    if (std::strcmp(argv[k], "--root") == 0 && k + 1 < argc) {
      g_root = argv[++k];
    } else if (std::strcmp(argv[k], "--dump-smt") == 0 && k + 1 < argc) {
      dump_smt_sample(argv[++k]);
      return 0;
    }
  }
  struct Item {
    int n;
    const char* name;
    Outcome (*run)();
  };
  const Item items[] = {
      {1, "maxElement end-to-end", maxelement_end_to_end},
      {2, "trait fixtures", trait_fixtures},
      {3, "flattened bodies re-verify", flattening_soundness},
      {4, "composition and makeAbstract preserve verification", composition_soundness},
      {5, "refinement soundness and mutant rejection", cbc_soundness},
      {6, "prover oracle agreement", oracle_agreement},
      {7, "interpreter correctness", interpreter_correctness},
  };
  int failed = 0;
  for (const auto& it : items) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d %s: %s (%.2fs) %s\n", it.n, o.pass ? "PASS" : "FAIL", it.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
