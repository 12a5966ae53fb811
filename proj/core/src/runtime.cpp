#include "squish/runtime.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

#include "squish/error.hpp"

namespace squish {

int set_num_threads(std::optional<int> threads) {
  if (!threads) {
    if (const char* env = std::getenv("SQUISH_THREADS"); env && *env) {
      try {
        threads = std::stoi(env);
      } catch (const std::exception&) {
        throw DomainError(std::string("SQUISH_THREADS is not an integer: ") + env);
      }
    }
  }
  if (threads) {
    if (*threads < 1) throw DomainError("thread count must be at least 1");
    omp_set_num_threads(*threads);
  }
  return omp_get_max_threads();
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace squish
