#include "qcap/io.hpp"

#include <fstream>
#include <iomanip>
#include <locale>
#include <sstream>

#include <json.hpp>

namespace qcap::io {

namespace {

using nlohmann::json;

int read_dim(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number_integer()) {
    throw ChannelError(std::string("channel json: '") + key + "' must be an integer");
  }
  const int d = doc[key].get<int>();
  if (d < 1) throw ChannelError(std::string("channel json: '") + key + "' must be positive");
  return d;
}

CMatrix read_operator(const json& op, int rows, int cols, std::size_t index) {
  const std::string where = "channel json: kraus[" + std::to_string(index) + "]";
  if (!op.is_array() || static_cast<int>(op.size()) != rows) {
    throw ChannelError(where + " must have " + std::to_string(rows) + " rows");
  }
  CMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = op[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw ChannelError(where + " row " + std::to_string(r) + " must have " + std::to_string(cols) + " entries");
    }
    for (int c = 0; c < cols; ++c) {
      const json& e = row[c];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw ChannelError(where + " entry (" + std::to_string(r) + "," + std::to_string(c) +
                           ") must be a [re, im] pair");
      }
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

}  // namespace

QuantumChannel channel_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ChannelError(std::string("channel json: ") + e.what());
  }
  if (!doc.is_object()) throw ChannelError("channel json: top level must be an object");
  std::string name = "channel";
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ChannelError("channel json: 'name' must be a string");
    name = doc["name"].get<std::string>();
  }
  const int din = read_dim(doc, "dim_in");
  const int dout = read_dim(doc, "dim_out");
  if (!doc.contains("kraus") || !doc["kraus"].is_array() || doc["kraus"].empty()) {
    throw ChannelError("channel json: 'kraus' must be a non-empty list");
  }
  std::vector<CMatrix> kraus;
  for (std::size_t i = 0; i < doc["kraus"].size(); ++i) {
    kraus.push_back(read_operator(doc["kraus"][i], dout, din, i));
  }
  return from_kraus(std::move(kraus), name);
}

QuantumChannel load_channel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ChannelError("cannot open channel file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return channel_from_json(ss.str());
}

std::string channel_to_json(const QuantumChannel& ch) {
  json kraus = json::array();
  for (const auto& e : ch.kraus()) {
    json op = json::array();
    for (int r = 0; r < e.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < e.cols(); ++c) row.push_back({e(r, c).real(), e(r, c).imag()});
      op.push_back(std::move(row));
    }
    kraus.push_back(std::move(op));
  }
  json doc = {{"name", ch.name()}, {"dim_in", ch.dim_in()}, {"dim_out", ch.dim_out()}, {"kraus", kraus}};
  return doc.dump(2);
}

std::string format_number(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace qcap::io
