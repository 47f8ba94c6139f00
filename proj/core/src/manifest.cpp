#include "elq/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace elq {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Split one delimited line, honoring double quotes with "" escapes.
std::vector<std::string> split_line(const std::string& line, char delim,
                                    const std::string& where) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') { cur += '"'; ++i; }
        else quoted = false;
      } else cur += c;
    } else if (c == '"') {
      quoted = true;
    } else if (c == delim) {
      fields.push_back(trim(cur));
      cur.clear();
    } else cur += c;
  }
  if (quoted) fail(Err::ManifestError, where + ": unterminated quote");
  fields.push_back(trim(cur));
  return fields;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\t") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  return out + "\"";
}

}  // namespace

CohortManifest CohortManifest::parse(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  // Header: sniff the delimiter, then map column positions.
  if (!std::getline(in, line)) fail(Err::ManifestError, origin + ": empty file");
  ++lineno;
  const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
  const std::vector<std::string> header =
      split_line(line, delim, origin + ":" + std::to_string(lineno));

  const std::vector<std::string> known = {"subject_id", "group", "site", "frame_path",
                                          "frame_index"};
  std::vector<int> col(known.size(), -1);
  for (int i = 0; i < int(header.size()); ++i) {
    std::string name = header[size_t(i)];
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    const auto it = std::find(known.begin(), known.end(), name);
    if (it == known.end())
      fail(Err::ManifestError, origin + ": unknown manifest column '" + header[size_t(i)] + "'");
    const size_t k = size_t(it - known.begin());
    if (col[k] != -1)
      fail(Err::ManifestError, origin + ": duplicate manifest column '" + name + "'");
    col[k] = i;
  }
  for (size_t k = 0; k < known.size(); ++k)
    if (col[k] == -1)
      fail(Err::ManifestError, origin + ": missing manifest column '" + known[k] + "'");

  CohortManifest manifest;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_line(line, delim, where);
    if (fields.size() != header.size())
      fail(Err::ManifestError, where + ": expected " + std::to_string(header.size()) +
                                   " fields, got " + std::to_string(fields.size()));
    ManifestRow row;
    row.subject_id = fields[size_t(col[0])];
    row.frame_path = fields[size_t(col[3])];
    if (row.subject_id.empty()) fail(Err::ManifestError, where + ": empty subject_id");
    if (row.frame_path.empty()) fail(Err::ManifestError, where + ": empty frame_path");
    try {
      row.group = parse_group(fields[size_t(col[1])]);
      row.site = parse_site(fields[size_t(col[2])]);
    } catch (const Error& e) {
      fail(Err::ManifestError, where + ": " + e.what());
    }
    try {
      size_t pos = 0;
      row.frame_index = std::stoi(fields[size_t(col[4])], &pos);
      if (pos != fields[size_t(col[4])].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      fail(Err::ManifestError,
           where + ": frame_index must be an integer, got '" + fields[size_t(col[4])] + "'");
    }
    if (row.frame_index < 0) fail(Err::ManifestError, where + ": negative frame_index");

    const std::string key = row.subject_id + "\x1f" + to_string(row.site) + "\x1f" +
                            std::to_string(row.frame_index);
    if (!seen.insert(key).second)
      fail(Err::ManifestError, where + ": duplicate (subject_id, site, frame_index) = (" +
                                   row.subject_id + ", " + to_string(row.site) + ", " +
                                   std::to_string(row.frame_index) + ")");
    manifest.rows.push_back(std::move(row));
  }
  return manifest;
}

CohortManifest CohortManifest::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void CohortManifest::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::IoError, "cannot write '" + path + "'");
  out << "subject_id,group,site,frame_path,frame_index\n";
  for (const ManifestRow& r : rows)
    out << quote_if_needed(r.subject_id) << ',' << to_string(r.group) << ',' << to_string(r.site)
        << ',' << quote_if_needed(r.frame_path) << ',' << r.frame_index << '\n';
}

}  // namespace elq
