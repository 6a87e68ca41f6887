#include "verdictpipe/synth.hpp"

#include <cstdio>
#include <fstream>

#include "verdictpipe/error.hpp"
#include "verdictpipe/rng.hpp"

namespace verdictpipe {
namespace {

const std::vector<std::string> kNeutral = {
    "This matter arises out of proceedings instituted before the High Court.",
    "Learned counsel appearing for the parties were heard at considerable length.",
    "The facts giving rise to the present proceedings may be briefly noticed.",
    "The respondent was served with notice and entered appearance through counsel.",
    "We have carefully perused the material placed on record.",
    "The Trial Court framed issues and recorded the evidence of witnesses.",
    "Reliance was placed on several decisions of this Court.",
    "The question of law that arises for consideration is a narrow one.",
    "The relevant statutory provisions are extracted hereinbelow for ready reference.",
    "Written submissions were filed on behalf of both sides.",
    "The State was represented by the Additional Advocate General.",
    "The matter was listed for final hearing after pleadings were completed.",
    "The chronology of events is not in dispute between the parties.",
    "It is necessary to examine the scope of the provision in some detail.",
    "The learned Single Judge considered the documents produced by the parties.",
    "The Division Bench heard the matter on the basis of the record.",
    "The parties had entered into an agreement relating to the property.",
    "The notification was issued by the competent authority under the Act.",
    "Counsel took us through the pleadings and the oral testimony.",
    "The contention advanced on behalf of the respondents requires consideration.",
    "The interpretation of the clause has been debated before us.",
    "The records of the case were summoned from the registry.",
    "The dispute pertains to a tenancy governed by the local rent legislation.",
    "Several affidavits were filed during the pendency of the proceedings.",
    "The principles governing the exercise of such jurisdiction are well settled.",
    "The evidence of the prosecution witnesses was recorded in detail.",
    "The municipal authority issued a show cause notice to the occupant.",
    "Leave was granted by this Court on an earlier date.",
    "The order under challenge was passed after hearing both sides.",
    "We now proceed to consider the rival submissions of the parties.",
};

const std::vector<std::string> kAllowTopical = {
    "The High Court committed a manifest error in overlooking the unrebutted documentary evidence.",
    "The findings recorded below are perverse and cannot be sustained in law.",
    "The appellant was entitled to the benefit of reasonable doubt on these facts.",
    "The impugned judgment suffers from a patent illegality warranting interference.",
    "The appellant shall be reinstated in service with continuity and consequential benefits.",
    "The compensation awarded is enhanced together with statutory interest.",
    "The appellant is acquitted of the charges and shall be released forthwith.",
    "The reasoning of the High Court is unsustainable and contrary to settled principles.",
    "The order of termination is quashed as it violates natural justice.",
    "The decree passed by the first appellate court is restored in its entirety.",
    "The prosecution failed to establish the chain of circumstances conclusively.",
    "Relief is granted to the appellant as prayed with costs throughout.",
};

const std::vector<std::string> kDismissTopical = {
    "We find no infirmity in the concurrent findings of fact recorded by the courts below.",
    "The judgment of the High Court is well reasoned and calls for no interference.",
    "The conviction and sentence awarded to the accused are affirmed.",
    "The submissions of learned counsel are devoid of substance and merit.",
    "The courts below have correctly appreciated the oral and documentary evidence.",
    "There is no perversity warranting exercise of our extraordinary jurisdiction.",
    "The view taken by the Tribunal is a plausible view and is upheld.",
    "The delay has not been satisfactorily explained by the petitioner.",
    "The findings are based on cogent evidence and sound reasoning.",
    "We are not persuaded to take a different view on this record.",
    "The order of the authority is in accordance with law and sustained.",
    "The claim was rightly rejected as barred by limitation.",
};

const std::vector<std::string> kDisposeTopical = {
    "The authority is directed to reconsider the representation afresh within eight weeks.",
    "The matter is remitted to the Tribunal for fresh consideration on merits.",
    "Liberty is granted to the parties to approach the appropriate forum.",
    "The time for compliance is extended by a further period of three months.",
    "The competent authority shall pass a reasoned order after affording a hearing.",
    "The interim arrangement shall continue until the fresh decision is taken.",
    "We express no opinion on the merits of the rival contentions.",
    "The Registry shall communicate these directions to the concerned officer.",
    "The respondents shall complete the exercise within a stipulated timeframe.",
    "All contentions of the parties are kept open for adjudication.",
    "The grievance may be ventilated before the statutory committee.",
    "The undertaking recorded before us shall bind the parties.",
};

const std::vector<std::string> kAllowOrders = {
    "In the result, the appeal is allowed.",
    "The appeals are allowed and the impugned order is set aside.",
    "Accordingly, the appeal stands allowed with no order as to costs.",
    "For the foregoing reasons the appeals stand allowed.",
};

const std::vector<std::string> kDismissOrders = {
    "In the result, the appeal is dismissed.",
    "The appeals are dismissed with no order as to costs.",
    "Consequently, the special leave petition is dismissed.",
    "For these reasons the appeal stands dismissed.",
};

const std::vector<std::string> kDisposeOrders = {
    "The appeal is disposed of in the above terms.",
    "The appeals stand disposed of accordingly.",
    "With these directions, the appeal is disposed of.",
    "The civil appeals are disposed of with no order as to costs.",
};

const std::vector<std::string>& topical(Disposition d) {
  switch (d) {
    case Disposition::Allow: return kAllowTopical;
    case Disposition::Dismiss: return kDismissTopical;
    case Disposition::Dispose: return kDisposeTopical;
  }
  return kAllowTopical;
}

std::size_t draw_between(CounterRng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

}  // namespace

const std::vector<std::string>& disposition_templates(Disposition d) {
  switch (d) {
    case Disposition::Allow: return kAllowOrders;
    case Disposition::Dismiss: return kDismissOrders;
    case Disposition::Dispose: return kDisposeOrders;
  }
  return kAllowOrders;
}

std::vector<SyntheticDocument> generate_synthetic_corpus(std::size_t n, std::uint64_t seed, const SynthConfig& cfg) {
  if (n < 30) throw Error(ErrorCode::InvalidConfig, "synthetic corpus needs n >= 30");
  if (cfg.min_neutral > cfg.max_neutral || cfg.min_topical > cfg.max_topical) {
    throw Error(ErrorCode::InvalidConfig, "synthetic sentence ranges are inverted");
  }
  std::vector<SyntheticDocument> docs;
  docs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(seed, i);
    const Disposition truth = disposition_at(i % kNumClasses);
    const auto& pool = topical(truth);

    std::vector<const std::string*> body;
    const std::size_t n_neutral = draw_between(rng, cfg.min_neutral, cfg.max_neutral);
    for (std::size_t k = 0; k < n_neutral; ++k) body.push_back(&kNeutral[rng.below(kNeutral.size())]);
    const std::size_t n_topical = draw_between(rng, cfg.min_topical, cfg.max_topical);
    for (std::size_t k = 0; k < n_topical; ++k) body.push_back(&pool[rng.below(pool.size())]);
    deterministic_shuffle(body.begin(), body.end(), rng);

    std::string text;
    for (const auto* s : body) {
      text += *s;
      text += ' ';
    }
    const auto& orders = disposition_templates(truth);
    text += orders[rng.below(orders.size())];
    text += '\n';
    docs.push_back({std::move(text), truth});
  }
  return docs;
}

void write_synthetic_corpus(const std::vector<SyntheticDocument>& docs, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string());
  std::ofstream labels(dir / "labels.tsv", std::ios::binary | std::ios::trunc);
  if (!labels) throw Error(ErrorCode::IoFailure, "cannot write labels.tsv in " + dir.string());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "case_%05zu.txt", i + 1);
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    out << docs[i].text;
    if (!out) throw Error(ErrorCode::IoFailure, std::string("cannot write ") + name);
    labels << name << '\t' << disposition_name(docs[i].truth) << '\n';
  }
}

}  // namespace verdictpipe
