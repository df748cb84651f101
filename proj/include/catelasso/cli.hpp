#pragma once

#include <iosfwd>

namespace catelasso {

inline constexpr const char* kVersion = "0.1.0";

/// Entry point of the cate_bench tool. Returns 0 on success, 1 on config or
/// usage errors, 2 on runtime errors.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace catelasso
