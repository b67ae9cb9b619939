#pragma once

#include <stdexcept>

namespace icl {

// Exit-code taxonomy shared by the CLI: 0 ok, 1 usage, 2 data, 3 scorer transport.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitTransport = 3;

} // namespace icl
