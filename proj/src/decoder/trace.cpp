#include "paraicl/trace.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace paraicl {

using nlohmann::json;

bool PlausibleTokenSet::contains(TokenId id) const {
  return std::binary_search(token_ids.begin(), token_ids.end(), id);
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string trace_to_json(const DecodeTrace& trace) {
  json steps = json::array();
  for (const auto& s : trace.steps) {
    json batches = json::array();
    for (const auto& d : s.batch_dists) {
      batches.push_back(
          {{"ids", d.ids()}, {"probs", d.probs()}, {"complete", d.complete()}});
    }
    json scores = json::array();
    for (double v : s.scores) scores.push_back(finite_or_null(v));
    steps.push_back({{"selected", s.selected},
                     {"selected_prob", s.selected_prob},
                     {"threshold", s.head.threshold},
                     {"head", s.head.token_ids},
                     {"support", s.support},
                     {"scores", scores},
                     {"batches", batches}});
  }
  json j = {{"continuation_ids", trace.continuation_ids},
            {"sequence_log_likelihood", finite_or_null(trace.sequence_log_likelihood)},
            {"stop_reason", trace.stop_reason},
            {"steps", steps}};
  return j.dump(1);
}

}  // namespace paraicl
