#include "metapi/study_csv.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "metapi/errors.hpp"
#include "metapi/text.hpp"

namespace metapi {

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

MetaDataset parse_studies(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError("study CSV: empty input");
  }
  const auto header = split_csv_line(strip_cr(line));
  if (header.size() != 3 || header[0] != "study_id" || header[1] != "effect" ||
      (header[2] != "se" && header[2] != "var")) {
    throw InputError("study CSV: header must be 'study_id,effect,se' or 'study_id,effect,var'");
  }
  const bool has_se = header[2] == "se";

  std::vector<StudySummary> studies;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw InputError("study CSV row " + std::to_string(row) + ": expected 3 fields, got " +
                       std::to_string(fields.size()));
    }
    StudySummary s;
    s.id = fields[0];
    try {
      s.effect = parse_double(fields[1]);
      const double scale = parse_double(fields[2]);
      s.within_variance = has_se ? scale * scale : scale;
      if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw InputError(std::string(has_se ? "se" : "var") + " must be positive");
      }
      if (!std::isfinite(s.effect)) {
        throw InputError("effect must be finite");
      }
    } catch (const InputError& e) {
      throw InputError("study CSV row " + std::to_string(row) + " ('" + s.id + "'): " +
                       e.what());
    }
    studies.push_back(std::move(s));
  }
  if (studies.size() < 2) {
    throw InputError("study CSV: at least 2 studies are required, got " +
                     std::to_string(studies.size()));
  }
  try {
    return MetaDataset(std::move(studies));
  } catch (const DatasetError& e) {
    throw InputError(std::string("study CSV: ") + e.what());
  }
}

MetaDataset parse_studies_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open study CSV '" + path + "'");
  }
  return parse_studies(in);
}

void write_studies(const MetaDataset& d, std::ostream& out) {
  out << "study_id,effect,var\n";
  for (const auto& s : d.studies()) {
    out << csv_escape(s.id) << ',' << format_double(s.effect) << ','
        << format_double(s.within_variance) << '\n';
  }
}

}  // namespace metapi
