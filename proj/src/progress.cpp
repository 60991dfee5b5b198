#include "writor/progress.hpp"

namespace writor {

Progress compute_progress(const Session& session) {
  Progress p;
  for (const auto& card : session.cards) {
    if (card.kind != CardKind::critique) continue;
    ++p.total;
    if (card.status == CardStatus::addressed) ++p.addressed;
  }
  if (p.total > 0) {
    p.fraction = static_cast<double>(p.addressed) / static_cast<double>(p.total);
  }
  return p;
}

}  // namespace writor
