#include "lsirm/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <unordered_map>

#include "lsirm/csv.hpp"
#include "lsirm/error.hpp"

namespace lsirm {

void IngestConfig::validate() const {
  for (int c : yea_codes)
    if (nay_codes.count(c) || missing_codes.count(c))
      throw ConfigError("ingest: code " + std::to_string(c) + " in more than one set");
  for (int c : nay_codes)
    if (missing_codes.count(c))
      throw ConfigError("ingest: code " + std::to_string(c) + " in more than one set");
  if (!(lopsided_threshold >= 0.0 && lopsided_threshold < 0.5))
    throw ConfigError("ingest: lopsided threshold must lie in [0, 0.5)");
}

namespace {

std::size_t pick_column(const CsvTable& t, std::initializer_list<const char*> names) {
  for (const char* n : names)
    if (t.has_column(n)) return t.column(n);
  std::string msg = "votes csv: missing column (";
  for (const char* n : names) msg += std::string(n) + " ";
  msg.back() = ')';
  throw DataError(msg);
}

// Voteview writes codes as integers, sometimes "1.0".
std::optional<int> parse_code(const std::string& s) {
  int v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc()) return std::nullopt;
  if (ptr != e) {
    std::string rest(ptr, e);
    if (rest.find_first_not_of(".0") != std::string::npos || rest[0] != '.')
      return std::nullopt;
  }
  return v;
}

struct Index {
  std::unordered_map<std::string, std::size_t> pos;
  std::vector<std::string> ids;
  std::size_t get(const std::string& id) {
    auto [it, inserted] = pos.emplace(id, ids.size());
    if (inserted) ids.push_back(id);
    return it->second;
  }
};

// Observed rows / columns of the matrix.
std::vector<std::size_t> observed_rows(const VoteMatrix& m) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < m.n_legislators(); ++i)
    for (std::size_t j = 0; j < m.n_bills(); ++j)
      if (m(i, j) != Vote::Missing) {
        rows.push_back(i);
        break;
      }
  return rows;
}

}  // namespace

VoteMatrix ingest_votes(std::istream& in, const IngestConfig& config,
                        IngestReport* report) {
  config.validate();
  CsvTable t = read_csv(in);
  const std::size_t lc = pick_column(t, {"legislator_id", "icpsr"});
  const std::size_t bc = pick_column(t, {"bill_id", "rollnumber"});
  const std::size_t cc = pick_column(t, {"cast_code", "vote"});

  Index legs, bills;
  struct Record { std::size_t i, j; Vote v; };
  std::vector<Record> records;
  IngestReport rep;
  for (const auto& r : t.rows) {
    const auto code = parse_code(r[cc]);
    Vote v = Vote::Missing;
    if (code && config.yea_codes.count(*code)) v = Vote::Yea;
    else if (code && config.nay_codes.count(*code)) v = Vote::Nay;
    else if (!code || !config.missing_codes.count(*code)) ++rep.unknown_codes;
    records.push_back({legs.get(r[lc]), bills.get(r[bc]), v});
  }
  rep.records = records.size();

  const std::size_t n = legs.ids.size(), p = bills.ids.size();
  std::vector<std::uint8_t> seen(n * p, 0);
  VoteMatrix m(n, p, std::vector<Vote>(n * p, Vote::Missing), legs.ids, bills.ids);
  for (const auto& rec : records) {
    if (seen[rec.i * p + rec.j]++)
      throw DataError("votes csv: duplicate record for legislator " + legs.ids[rec.i] +
                      ", bill " + bills.ids[rec.j]);
    m(rec.i, rec.j) = rec.v;
  }
  if (m.n_observed() == 0) throw DataError("votes csv: empty result");

  if (config.drop_empty) {
    std::vector<std::size_t> rows = observed_rows(m), cols;
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t i = 0; i < n; ++i)
        if (m(i, j) != Vote::Missing) {
          cols.push_back(j);
          break;
        }
    rep.dropped_legislators = n - rows.size();
    rep.dropped_bills = p - cols.size();
    if (rows.size() != n || cols.size() != p) m = m.select(rows, cols);
  }
  if (report) *report = rep;
  return m;
}

VoteMatrix filter_lopsided(const VoteMatrix& data, double threshold, FilterReport* report) {
  if (!(threshold >= 0.0 && threshold < 0.5))
    throw ConfigError("filter_lopsided: threshold must lie in [0, 0.5)");
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < data.n_bills(); ++j) {
    std::size_t yea = 0, nay = 0;
    for (std::size_t i = 0; i < data.n_legislators(); ++i) {
      yea += data(i, j) == Vote::Yea;
      nay += data(i, j) == Vote::Nay;
    }
    if (yea + nay == 0) continue;
    const double share = static_cast<double>(std::min(yea, nay)) / (yea + nay);
    // A unanimous bill carries no information at any threshold.
    if (share >= threshold && std::min(yea, nay) > 0) cols.push_back(j);
  }
  std::vector<std::size_t> all(data.n_legislators());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  VoteMatrix kept = data.select(all, cols);
  std::vector<std::size_t> rows = observed_rows(kept);
  std::vector<std::size_t> every_col(kept.n_bills());
  for (std::size_t j = 0; j < every_col.size(); ++j) every_col[j] = j;
  if (rows.size() != kept.n_legislators()) kept = kept.select(rows, every_col);
  if (report) {
    report->kept_bills = cols.size();
    report->dropped_bills = data.n_bills() - cols.size();
    report->dropped_legislators = data.n_legislators() - rows.size();
  }
  return kept;
}

}  // namespace lsirm
