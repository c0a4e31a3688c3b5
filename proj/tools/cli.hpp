#pragma once

#include <atomic>
#include <ostream>
#include <string>

#include "ovcd/backends.hpp"
#include "ovcd/types.hpp"

namespace ovcd::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInvalidArgs = 2,
  kExitBackend = 3,
  kExitIo = 4,
  kExitInterrupted = 130,
};

// Runs one `ovcd` invocation. `cancel` is polled between queries and pairs;
// when it fires the current manifest is flushed with status "cancelled".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const std::atomic<bool>* cancel = nullptr);

// "synthetic", "remote" (URL from OVCD_BACKEND_URL) or "remote:URL".
Backends resolve_backend(const std::string& spec);
std::string backend_url(const std::string& spec);

// "building" or "building=building,house,rooftop".
QuerySpec parse_query(const std::string& text);

}  // namespace ovcd::cli
