#ifndef WFARED_IO_HPP
#define WFARED_IO_HPP

#include <string>

#include "wfared/wfa.hpp"

namespace wfared {

/// JSON interchange format:
///   {"alpha": [..], "transition": [[..], ..], "beta": [..], "comment": ".."}
/// Dimensions must agree; NaN/Inf entries are rejected.
Wfa parse_wfa_json(const std::string& text);
Wfa read_wfa_json(const std::string& path);

std::string emit_wfa_json(const Wfa& w, const std::string& comment = "");
void write_wfa_json(const Wfa& w, const std::string& path,
                    const std::string& comment = "");

}  // namespace wfared

#endif
