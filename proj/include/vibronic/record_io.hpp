#pragma once
// Line-oriented text formats: '#'-prefixed "key = value" header lines followed
// by comma-separated rows. Reals are written with 17 significant digits.

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vibronic/tomography.hpp"

namespace vibronic::io {

using HeaderFields = std::vector<std::pair<std::string, std::string>>;

/// Thrown for unreadable or malformed files.
class IoError : public Error {
 public:
  using Error::Error;
};

std::string format_real(double v);

/// "# vibronic_version = ..." followed by every field as "# key = value".
void write_header(std::ostream& os, const HeaderFields& fields);

/// Record params and seed as "# record.<key> = value", then rows tau,p_dd,shots.
void write_record(std::ostream& os, const SignalRecord& rec);
SignalRecord read_record(std::istream& is);

/// Rows re_ac,im_ac,re_ar,im_ar,w.
void write_wigner_rows(std::ostream& os, const std::vector<WignerPoint>& points);

}  // namespace vibronic::io
