#ifndef GSHIFT_VERSION_HPP
#define GSHIFT_VERSION_HPP

namespace gshift {

inline constexpr const char* kVersion = "0.1.0";

} // namespace gshift

#endif
