#ifndef HARBORSIM_VERSION_HPP
#define HARBORSIM_VERSION_HPP

namespace harborsim {

inline constexpr const char* kVersion = "0.1.0";

} // namespace harborsim

#endif
