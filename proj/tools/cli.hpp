#pragma once

#include "twistsel/server.hpp"

#include <functional>
#include <iosfwd>

namespace twistsel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Called by `serve` once the port is bound, before blocking. Tests use it
/// to learn the port and stop the server.
using ListenHook = std::function<void(Server&, unsigned short port)>;

/// Entry point of the twistsel executable. Output of the subcommands goes to
/// out, diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const ListenHook& on_listen = {});

}  // namespace twistsel::cli
