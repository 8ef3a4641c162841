#include "lsirm/vote_matrix.hpp"

#include <algorithm>
#include <unordered_set>

#include "lsirm/error.hpp"

namespace lsirm {

namespace {

void check_unique(const std::vector<std::string>& ids, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids)
    if (!seen.insert(id).second)
      throw ContractViolation(std::string("duplicate ") + what + " id '" + id +
                              "'");
}

}  // namespace

std::vector<std::string> numbered_ids(const std::string& prefix,
                                      std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i + 1));
  return out;
}

VoteMatrix::VoteMatrix(std::size_t n_legislators, std::size_t n_bills,
                       Vote fill)
    : n_rows_(n_legislators),
      n_cols_(n_bills),
      cells_(n_legislators * n_bills, fill),
      leg_ids_(numbered_ids("L", n_legislators)),
      bill_ids_(numbered_ids("B", n_bills)) {}

VoteMatrix::VoteMatrix(std::size_t n_legislators, std::size_t n_bills,
                       std::vector<Vote> cells,
                       std::vector<std::string> legislator_ids,
                       std::vector<std::string> bill_ids)
    : n_rows_(n_legislators),
      n_cols_(n_bills),
      cells_(std::move(cells)),
      leg_ids_(std::move(legislator_ids)),
      bill_ids_(std::move(bill_ids)) {
  validate();
}

Vote VoteMatrix::at(std::size_t i, std::size_t j) const {
  require(i < n_rows_ && j < n_cols_, "vote matrix index out of range");
  return (*this)(i, j);
}

void VoteMatrix::set_legislator_ids(std::vector<std::string> ids) {
  require(ids.size() == n_rows_, "legislator id count mismatch");
  check_unique(ids, "legislator");
  leg_ids_ = std::move(ids);
}

void VoteMatrix::set_bill_ids(std::vector<std::string> ids) {
  require(ids.size() == n_cols_, "bill id count mismatch");
  check_unique(ids, "bill");
  bill_ids_ = std::move(ids);
}

std::size_t VoteMatrix::n_observed() const {
  return static_cast<std::size_t>(std::count_if(
      cells_.begin(), cells_.end(), [](Vote v) { return v != Vote::Missing; }));
}

void VoteMatrix::validate() const {
  require(cells_.size() == n_rows_ * n_cols_, "cell count does not match shape");
  require(leg_ids_.size() == n_rows_, "legislator id count mismatch");
  require(bill_ids_.size() == n_cols_, "bill id count mismatch");
  check_unique(leg_ids_, "legislator");
  check_unique(bill_ids_, "bill");
  for (const auto& [name, values] : labels.legislator)
    require(values.size() == n_rows_,
            "legislator label '" + name + "' has wrong length");
  for (const auto& [name, values] : labels.bill)
    require(values.size() == n_cols_, "bill label '" + name + "' has wrong length");
}

VoteMatrix VoteMatrix::select(const std::vector<std::size_t>& rows,
                              const std::vector<std::size_t>& cols) const {
  VoteMatrix out(rows.size(), cols.size());
  std::vector<std::string> lids, bids;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require(rows[r] < n_rows_, "row index out of range");
    lids.push_back(leg_ids_[rows[r]]);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      require(cols[c] < n_cols_, "column index out of range");
      out(r, c) = (*this)(rows[r], cols[c]);
    }
  }
  for (std::size_t c : cols) bids.push_back(bill_ids_[c]);
  out.leg_ids_ = std::move(lids);
  out.bill_ids_ = std::move(bids);
  for (const auto& [name, values] : labels.legislator) {
    auto& dst = out.labels.legislator[name];
    for (std::size_t r : rows) dst.push_back(values[r]);
  }
  for (const auto& [name, values] : labels.bill) {
    auto& dst = out.labels.bill[name];
    for (std::size_t c : cols) dst.push_back(values[c]);
  }
  return out;
}

}  // namespace lsirm
