#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lsirm {

enum class Vote : std::uint8_t { Nay = 0, Yea = 1, Missing = 2 };

// Named per-node annotations, e.g. legislator["faction"][i] or
// bill["type"][j]. Each vector has one entry per legislator / bill.
struct Labels {
  std::map<std::string, std::vector<std::string>> legislator;
  std::map<std::string, std::vector<std::string>> bill;

  bool empty() const { return legislator.empty() && bill.empty(); }
  bool operator==(const Labels&) const = default;
};

// Legislator x bill matrix of Yea / Nay / Missing, stored row-major.
class VoteMatrix {
 public:
  VoteMatrix() = default;
  VoteMatrix(std::size_t n_legislators, std::size_t n_bills,
             Vote fill = Vote::Missing);
  VoteMatrix(std::size_t n_legislators, std::size_t n_bills,
             std::vector<Vote> cells, std::vector<std::string> legislator_ids,
             std::vector<std::string> bill_ids);

  std::size_t n_legislators() const { return n_rows_; }
  std::size_t n_bills() const { return n_cols_; }

  Vote operator()(std::size_t i, std::size_t j) const {
    return cells_[i * n_cols_ + j];
  }
  Vote& operator()(std::size_t i, std::size_t j) {
    return cells_[i * n_cols_ + j];
  }
  Vote at(std::size_t i, std::size_t j) const;

  const std::vector<Vote>& cells() const { return cells_; }
  const std::vector<std::string>& legislator_ids() const { return leg_ids_; }
  const std::vector<std::string>& bill_ids() const { return bill_ids_; }
  void set_legislator_ids(std::vector<std::string> ids);
  void set_bill_ids(std::vector<std::string> ids);

  Labels labels;

  std::size_t n_observed() const;
  std::size_t n_missing() const { return cells_.size() - n_observed(); }

  // Checks shape, id uniqueness and label lengths; throws ContractViolation.
  void validate() const;

  // Keeps the listed rows / columns, in the order given, together with ids
  // and labels.
  VoteMatrix select(const std::vector<std::size_t>& rows,
                    const std::vector<std::size_t>& cols) const;

  bool operator==(const VoteMatrix&) const = default;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<Vote> cells_;
  std::vector<std::string> leg_ids_;
  std::vector<std::string> bill_ids_;
};

std::vector<std::string> numbered_ids(const std::string& prefix,
                                      std::size_t n);

}  // namespace lsirm
