#ifndef KHS_VERSION_HPP
#define KHS_VERSION_HPP

namespace khs {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
