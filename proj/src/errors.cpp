#include "streamcc/errors.hpp"

namespace streamcc {

namespace {

std::string join_reports(const std::vector<std::string>& reports) {
    std::string message = std::to_string(reports.size()) + " event(s) rejected";
    for (const auto& r : reports) message += "\n  " + r;
    return message;
}

}  // namespace

RejectedEventsError::RejectedEventsError(std::vector<std::string> reports)
    : ParseError(join_reports(reports)), reports_(std::move(reports)) {}

SearchBudgetExceeded::SearchBudgetExceeded(std::size_t expansions, std::string case_id)
    : Error("shortest-path search exceeded its budget of " + std::to_string(expansions) + " expansions" +
            (case_id.empty() ? std::string() : " for case '" + case_id + "'")),
      expansions_(expansions),
      case_id_(std::move(case_id)) {}

}  // namespace streamcc
