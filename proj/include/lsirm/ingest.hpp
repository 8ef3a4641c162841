#pragma once

#include <iosfwd>
#include <set>
#include <string>

#include "lsirm/vote_matrix.hpp"

namespace lsirm {

// Voteview cast codes by default.
struct IngestConfig {
  std::set<int> yea_codes{1, 2, 3};
  std::set<int> nay_codes{4, 5, 6};
  std::set<int> missing_codes{7, 8, 9, 0};
  double lopsided_threshold = 0.025;
  bool drop_empty = true;

  void validate() const;  // throws ConfigError
};

struct IngestReport {
  std::size_t records = 0;
  std::size_t unknown_codes = 0;  // mapped to Missing
  std::size_t dropped_legislators = 0;
  std::size_t dropped_bills = 0;
};

// Long-format votes: one record per (legislator, bill) with a cast code.
// Column names accepted: legislator_id | icpsr, bill_id | rollnumber,
// cast_code | vote. Rows and columns follow first appearance in the file.
VoteMatrix ingest_votes(std::istream& in, const IngestConfig& config,
                        IngestReport* report = nullptr);

struct FilterReport {
  std::size_t kept_bills = 0;
  std::size_t dropped_bills = 0;
  std::size_t dropped_legislators = 0;
};

// Drops bills whose observed minority share is below `threshold`, then any
// legislator left with no observed vote.
VoteMatrix filter_lopsided(const VoteMatrix& data, double threshold,
                           FilterReport* report = nullptr);

}  // namespace lsirm
