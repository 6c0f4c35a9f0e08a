#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fsupart {

// Domain error with a machine-readable kind and the indices it concerns
// (vertex ids, matrix entries, mode numbers, ...).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message, std::vector<long> indices = {})
      : std::runtime_error(message), kind_(std::move(kind)), indices_(std::move(indices)) {}

  const std::string& kind() const noexcept { return kind_; }
  const std::vector<long>& indices() const noexcept { return indices_; }

 private:
  std::string kind_;
  std::vector<long> indices_;
};

}  // namespace fsupart
