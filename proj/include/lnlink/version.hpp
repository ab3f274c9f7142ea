#pragma once

namespace lnlink {

inline constexpr const char* kToolVersion = "0.1.0";

}
