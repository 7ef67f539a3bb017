#ifndef EFFHSIM_VERSION_HPP
#define EFFHSIM_VERSION_HPP

namespace effhsim {

inline constexpr const char* kVersion = "0.1.0";

}

#endif
