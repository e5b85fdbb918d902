#ifndef QSEP_IO_UTIL_HPP
#define QSEP_IO_UTIL_HPP

#include <string>

namespace qsep {

// 17 significant digits: exact round trip for IEEE doubles.
std::string format_double17(double x);

// Write to <path>.tmp then rename, so failures never leave partial output.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace qsep

#endif
