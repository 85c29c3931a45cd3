#include "wfared/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wfared/errors.hpp"

namespace wfared {

namespace {

using nlohmann::json;

Vector parse_number_array(const json& j, const char* field) {
  if (!j.is_array())
    throw Error(ErrorCode::invalid_input,
                std::string("wfa json: \"") + field + "\" must be an array");
  Vector v(j.size());
  Index i = 0;
  for (const auto& x : j) {
    if (!x.is_number())
      throw Error(ErrorCode::invalid_input,
                  std::string("wfa json: non-numeric entry in \"") + field +
                      "\"");
    const double d = x.get<double>();
    if (!std::isfinite(d))
      throw Error(ErrorCode::invalid_input,
                  std::string("wfa json: non-finite entry in \"") + field +
                      "\"");
    v(i++) = d;
  }
  return v;
}

}  // namespace

Wfa parse_wfa_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_input,
                std::string("wfa json: parse failure: ") + e.what());
  }
  if (!j.is_object() || !j.contains("alpha") || !j.contains("transition") ||
      !j.contains("beta")) {
    throw Error(ErrorCode::invalid_input,
                "wfa json: expected object with alpha, transition, beta");
  }

  Wfa w;
  w.alpha = parse_number_array(j["alpha"], "alpha");
  w.beta = parse_number_array(j["beta"], "beta");
  const Index n = w.alpha.size();
  if (w.beta.size() != n)
    throw Error(ErrorCode::invalid_input,
                "wfa json: alpha and beta lengths differ");
  const auto& rows = j["transition"];
  if (!rows.is_array() || static_cast<Index>(rows.size()) != n)
    throw Error(ErrorCode::invalid_input,
                "wfa json: transition must have one row per state");
  w.A = Matrix(n, n);
  for (Index i = 0; i < n; ++i) {
    const Vector row = parse_number_array(rows[i], "transition");
    if (row.size() != n)
      throw Error(ErrorCode::invalid_input,
                  "wfa json: transition rows must match the state count");
    w.A.row(i) = row.transpose();
  }
  validate(w);
  return w;
}

Wfa read_wfa_json(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::invalid_input, "cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_wfa_json(buf.str());
}

std::string emit_wfa_json(const Wfa& w, const std::string& comment) {
  validate(w);
  json j;
  j["alpha"] = std::vector<double>(w.alpha.data(), w.alpha.data() + w.alpha.size());
  j["beta"] = std::vector<double>(w.beta.data(), w.beta.data() + w.beta.size());
  json rows = json::array();
  for (Index i = 0; i < w.states(); ++i) {
    json row = json::array();
    for (Index c = 0; c < w.states(); ++c) row.push_back(w.A(i, c));
    rows.push_back(row);
  }
  j["transition"] = rows;
  if (!comment.empty()) j["comment"] = comment;
  return j.dump(2) + "\n";
}

void write_wfa_json(const Wfa& w, const std::string& path,
                    const std::string& comment) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::invalid_input, "cannot open output file: " + path);
  out << emit_wfa_json(w, comment);
}

}  // namespace wfared
