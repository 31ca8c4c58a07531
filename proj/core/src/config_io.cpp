// SPDX-License-Identifier: Apache-2.0
#include "spinqpu/config_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <system_error>

namespace spinqpu::io {

namespace {

double require_number(const Json& node, const std::string& key, const std::string& where) {
  if (!node.contains(key))
    throw ValidationError(kModule, where + ": missing key '" + key + "'");
  if (!node[key].is_number())
    throw ValidationError(kModule, where + ": key '" + key + "' must be a number");
  return node[key].get<double>();
}

double optional_number(const Json& node, const std::string& key, double fallback,
                       const std::string& where) {
  if (!node.contains(key)) return fallback;
  if (!node[key].is_number())
    throw ValidationError(kModule, where + ": key '" + key + "' must be a number");
  return node[key].get<double>();
}

}  // namespace

spin::SpinSystemSpec parse_system(const Json& config) {
  if (!config.is_object())
    throw ValidationError(kModule, "system spec must be a JSON object");
  if (!config.contains("sites") || !config["sites"].is_array() ||
      config["sites"].empty())
    throw ValidationError(kModule, "system spec needs a nonempty 'sites' array");

  spin::SpinSystemSpec spec;
  int index = 0;
  for (const Json& site_json : config["sites"]) {
    const std::string where = "site " + std::to_string(index);
    spin::SpinSite site;
    site.spin = require_number(site_json, "spin", where);
    if (site_json.contains("g")) {
      const Json& g = site_json["g"];
      if (g.is_number()) {
        const double val = g.get<double>();
        site.g = {val, val, val};
      } else if (g.is_array() && g.size() == 3 && g[0].is_number() &&
                 g[1].is_number() && g[2].is_number()) {
        site.g = {g[0].get<double>(), g[1].get<double>(), g[2].get<double>()};
      } else {
        throw ValidationError(kModule,
                              where + ": 'g' must be a number or a 3-array");
      }
    }
    site.d_ghz = optional_number(site_json, "D_ghz", 0.0, where);
    site.e_ghz = optional_number(site_json, "E_ghz", 0.0, where);
    if (site_json.contains("nuclear_spin")) {
      spin::NuclearSpin nuclear;
      nuclear.spin = require_number(site_json, "nuclear_spin", where);
      nuclear.a_ghz = optional_number(site_json, "A_ghz", 0.0, where);
      nuclear.p_ghz = optional_number(site_json, "p_ghz", 0.0, where);
      site.nuclear = nuclear;
    } else if (site_json.contains("A_ghz") || site_json.contains("p_ghz")) {
      throw ValidationError(kModule,
                            where + ": 'A_ghz'/'p_ghz' need a 'nuclear_spin'");
    }
    spec.sites.push_back(site);
    ++index;
  }

  if (config.contains("couplings")) {
    if (!config["couplings"].is_array())
      throw ValidationError(kModule, "'couplings' must be an array");
    int cindex = 0;
    for (const Json& c : config["couplings"]) {
      const std::string where = "coupling " + std::to_string(cindex);
      spin::Coupling coupling;
      coupling.site_i = static_cast<int>(require_number(c, "i", where));
      coupling.site_j = static_cast<int>(require_number(c, "j", where));
      coupling.j_ghz = require_number(c, "J_ghz", where);
      spec.couplings.push_back(coupling);
      ++cindex;
    }
  }

  if (config.contains("field_tesla")) {
    const Json& field = config["field_tesla"];
    if (!field.is_array() || field.size() != 3 || !field[0].is_number() ||
        !field[1].is_number() || !field[2].is_number())
      throw ValidationError(kModule, "'field_tesla' must be a 3-array of numbers");
    spec.field_tesla = Eigen::Vector3d(field[0].get<double>(), field[1].get<double>(),
                                       field[2].get<double>());
  }
  spec.validate();
  return spec;
}

OrderedJson canonical_system(const spin::SpinSystemSpec& spec) {
  OrderedJson out;
  out["sites"] = OrderedJson::array();
  for (const auto& site : spec.sites) {
    OrderedJson s;
    s["spin"] = site.spin;
    if (site.g[0] == site.g[1] && site.g[1] == site.g[2]) {
      s["g"] = site.g[0];
    } else {
      s["g"] = OrderedJson::array({site.g[0], site.g[1], site.g[2]});
    }
    if (site.d_ghz != 0.0) s["D_ghz"] = site.d_ghz;
    if (site.e_ghz != 0.0) s["E_ghz"] = site.e_ghz;
    if (site.nuclear) {
      s["nuclear_spin"] = site.nuclear->spin;
      if (site.nuclear->a_ghz != 0.0) s["A_ghz"] = site.nuclear->a_ghz;
      if (site.nuclear->p_ghz != 0.0) s["p_ghz"] = site.nuclear->p_ghz;
    }
    out["sites"].push_back(s);
  }
  if (!spec.couplings.empty()) {
    out["couplings"] = OrderedJson::array();
    for (const auto& c : spec.couplings) {
      OrderedJson cj;
      cj["i"] = c.site_i;
      cj["j"] = c.site_j;
      cj["J_ghz"] = c.j_ghz;
      out["couplings"].push_back(cj);
    }
  }
  out["field_tesla"] = OrderedJson::array(
      {spec.field_tesla[0], spec.field_tesla[1], spec.field_tesla[2]});
  return out;
}

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ValidationError(kModule, "cannot open '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& err) {
    // nlohmann reports a byte offset; convert to line/column.
    std::size_t line = 1, column = 1;
    for (std::size_t k = 0; k + 1 < err.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ValidationError(kModule, "parse error in '" + path.string() + "' at line " +
                                       std::to_string(line) + ", column " +
                                       std::to_string(column));
  }
}

void apply_override(Json& config, const std::string& dotted_key,
                    const std::string& value) {
  if (dotted_key.empty()) throw ValidationError(kModule, "empty override key");
  Json* node = &config;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = dotted_key.find('.', start);
    const std::string part = dotted_key.substr(
        start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ValidationError(kModule, "malformed override key");
    if (dot == std::string::npos) {
      Json parsed = Json::parse(value, nullptr, false);
      (*node)[part] = parsed.is_discarded() ? Json(value) : parsed;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

std::string format_number(double value) {
  char buffer[48];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                    std::chars_format::general, 12);
  if (result.ec != std::errc())
    throw ContractError(kModule, "number formatting failed");
  return std::string(buffer, result.ptr);
}

CsvBuilder::CsvBuilder(const std::vector<std::string>& header)
    : columns_(header.size()) {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) payload_ += ',';
    payload_ += header[k];
  }
  payload_ += '\n';
}

void CsvBuilder::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw ContractError(kModule, "CSV row width does not match the header");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) payload_ += ',';
    payload_ += cells[k];
  }
  payload_ += '\n';
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ContractError(kModule, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ContractError(kModule, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw ContractError(kModule, "atomic rename to '" + path.string() + "' failed");
}

}  // namespace spinqpu::io
