#include <algorithm>
#include <array>
#include <numeric>
#include <set>
#include <string_view>

#include "r2f/corpus.hpp"
#include "r2f/error.hpp"
#include "r2f/io.hpp"
#include "r2f/random.hpp"
#include "r2f/retrieval.hpp"
#include "r2f/text.hpp"

namespace r2f {
namespace {

struct WordPair {
  std::string_view word;
  std::string_view synonym;
};

constexpr std::array<WordPair, 40> kVerbs = {{
    {"reported", "announced"},   {"visited", "toured"},        {"purchased", "bought"},
    {"described", "portrayed"},  {"inspected", "examined"},    {"approved", "endorsed"},
    {"built", "constructed"},    {"repaired", "mended"},       {"delivered", "supplied"},
    {"collected", "gathered"},   {"donated", "contributed"},   {"ordered", "requested"},
    {"rejected", "refused"},     {"praised", "commended"},     {"criticized", "condemned"},
    {"studied", "analyzed"},     {"photographed", "filmed"},   {"recorded", "documented"},
    {"sold", "auctioned"},       {"painted", "decorated"},     {"moved", "relocated"},
    {"cleaned", "scrubbed"},     {"counted", "tallied"},       {"tested", "trialled"},
    {"shipped", "transported"},  {"stored", "warehoused"},     {"measured", "gauged"},
    {"designed", "drafted"},     {"restored", "renovated"},    {"guarded", "protected"},
    {"mapped", "surveyed"},      {"borrowed", "rented"},       {"launched", "unveiled"},
    {"cancelled", "scrapped"},   {"funded", "financed"},       {"hired", "recruited"},
    {"planted", "sowed"},        {"harvested", "reaped"},      {"catalogued", "indexed"},
    {"sorted", "arranged"},
}};

constexpr std::array<WordPair, 40> kAdjectives = {{
    {"large", "big"},          {"small", "little"},        {"old", "aged"},
    {"new", "fresh"},          {"quiet", "calm"},          {"modern", "contemporary"},
    {"rapid", "quick"},        {"damaged", "broken"},      {"expensive", "costly"},
    {"cheap", "inexpensive"},  {"famous", "renowned"},     {"rare", "scarce"},
    {"heavy", "weighty"},      {"bright", "vivid"},        {"narrow", "slim"},
    {"wide", "broad"},         {"ugly", "unsightly"},      {"beautiful", "lovely"},
    {"strange", "odd"},        {"simple", "plain"},        {"huge", "enormous"},
    {"tiny", "minute"},        {"wooden", "timber"},       {"metal", "steel"},
    {"local", "regional"},     {"foreign", "overseas"},    {"secret", "hidden"},
    {"public", "communal"},    {"private", "personal"},    {"empty", "vacant"},
    {"crowded", "packed"},     {"dirty", "filthy"},        {"clean", "spotless"},
    {"fragile", "delicate"},   {"sturdy", "robust"},       {"valuable", "precious"},
    {"popular", "favored"},    {"dangerous", "hazardous"}, {"ancient", "antique"},
    {"silent", "mute"},
}};

constexpr std::array<WordPair, 40> kNouns = {{
    {"cars", "automobiles"},      {"buildings", "structures"},  {"samples", "specimens"},
    {"tickets", "passes"},        {"boats", "vessels"},         {"contracts", "agreements"},
    {"paintings", "artworks"},    {"books", "volumes"},         {"houses", "homes"},
    {"bridges", "overpasses"},    {"computers", "machines"},    {"letters", "messages"},
    {"photographs", "pictures"},  {"statues", "sculptures"},    {"horses", "steeds"},
    {"tools", "implements"},      {"bottles", "flasks"},        {"coins", "tokens"},
    {"lamps", "lanterns"},        {"carpets", "rugs"},          {"chairs", "seats"},
    {"maps", "charts"},           {"gifts", "presents"},        {"students", "pupils"},
    {"doctors", "physicians"},    {"workers", "laborers"},      {"sailors", "mariners"},
    {"farmers", "growers"},       {"children", "kids"},         {"fields", "meadows"},
    {"roads", "streets"},         {"shops", "stores"},          {"phones", "handsets"},
    {"jackets", "coats"},         {"songs", "tunes"},           {"crates", "boxes"},
    {"engines", "motors"},        {"rooms", "chambers"},        {"trucks", "lorries"},
    {"gardens", "orchards"},
}};

constexpr std::array<std::string_view, 40> kPeople = {
    "Alvarez", "Brennan",  "Castillo", "Dumont",  "Eriksen", "Fischer", "Garcia",  "Haddad",
    "Ivanova", "Jensen",   "Kowalski", "Larsen",  "Moreau",  "Nakamura", "Okafor", "Petrov",
    "Quinlan", "Rossi",    "Santos",   "Tanaka",  "Ulrich",  "Varga",   "Whitley", "Xu",
    "Yilmaz",  "Zhang",    "Abbott",   "Becker",  "Conti",   "Delgado", "Esposito", "Ferreira",
    "Grant",   "Holmberg", "Ibarra",   "Jovanovic", "Keller", "Lindqvist", "Mendes", "Novak",
};

constexpr std::array<std::string_view, 30> kPlaces = {
    "Lisbon",   "Oslo",     "Nairobi",  "Lima",     "Dublin",  "Krakow",   "Hanoi",  "Quito",
    "Tunis",    "Riga",     "Cusco",    "Bergen",   "Porto",   "Valencia", "Tallinn", "Accra",
    "Leeds",    "Geneva",   "Austin",   "Calgary",  "Perth",   "Osaka",    "Seville", "Dakar",
    "Antwerp",  "Bologna",  "Cork",     "Malmo",    "Zagreb",  "Halifax",
};

// {P} person, {L} place, {N} figure, {V} verb, {A} adjective, {O} noun.
constexpr std::array<std::string_view, 8> kTemplates = {
    "{P} {V} {N} {A} {O} near {L}.",
    "In {L}, {P} {V} about {N} {A} {O} last year.",
    "{P} said that {N} {A} {O} were {V} in {L}.",
    "According to {P}, the team in {L} {V} {N} {A} {O}.",
    "{P} {V} the {A} {O} for {N} days in {L}.",
    "Officials in {L} confirmed that {P} {V} {N} {A} {O}.",
    "Last month {P} {V} {N} {A} {O} across {L}.",
    "{P} and the council of {L} {V} {N} {A} {O}.",
};

enum class Slot { kVerb, kAdjective, kNoun };

// One rendered sentence, kept symbolic so hypotheses can be re-rendered
// with synonyms or corrupted values.
struct Frame {
  std::size_t tmpl = 0;
  std::string person;
  std::string place;
  int figure = 0;
  std::size_t verb = 0;
  std::size_t adjective = 0;
  std::size_t noun = 0;
  bool verb_synonym = false;
  bool adjective_synonym = false;
  bool noun_synonym = false;
};

std::string render(const Frame& f, bool lowercase_leading_word) {
  const std::string_view tmpl = kTemplates[f.tmpl];
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{' && i + 2 < tmpl.size() && tmpl[i + 2] == '}') {
      switch (tmpl[i + 1]) {
        case 'P': out += f.person; break;
        case 'L': out += f.place; break;
        case 'N': out += std::to_string(f.figure); break;
        case 'V': out += f.verb_synonym ? kVerbs[f.verb].synonym : kVerbs[f.verb].word; break;
        case 'A':
          out += f.adjective_synonym ? kAdjectives[f.adjective].synonym : kAdjectives[f.adjective].word;
          break;
        case 'O': out += f.noun_synonym ? kNouns[f.noun].synonym : kNouns[f.noun].word; break;
        default: break;
      }
      i += 2;
      continue;
    }
    out.push_back(tmpl[i]);
  }
  if (lowercase_leading_word && tmpl.front() != '{' && !out.empty()) {
    out.front() = static_cast<char>(out.front() - 'A' + 'a');
  }
  return out;
}

// Draws indices without replacement, reshuffling once the deck runs out.
class Deck {
 public:
  Deck(std::size_t size, Rng& rng) : order_(size), rng_(rng) { refill(); }

  std::size_t draw() {
    if (next_ == order_.size()) refill();
    return order_[next_++];
  }

 private:
  void refill() {
    std::iota(order_.begin(), order_.end(), 0);
    rng_.shuffle(order_);
    next_ = 0;
  }

  std::vector<std::size_t> order_;
  Rng& rng_;
  std::size_t next_ = 0;
};

void substitute_one(Frame& f, Rng& rng) {
  switch (static_cast<Slot>(rng.index(3))) {
    case Slot::kVerb: f.verb_synonym = true; break;
    case Slot::kAdjective: f.adjective_synonym = true; break;
    case Slot::kNoun: f.noun_synonym = true; break;
  }
}

// Replaces the figure, person or place with a value the premise never uses.
void corrupt(Frame& f, const std::set<std::string>& used_people, const std::string& place,
             int figure, Rng& rng) {
  const double draw = rng.uniform();
  if (draw < 0.5) {
    int value = figure;
    while (value == figure) value = rng.between(2, 950);
    f.figure = value;
  } else if (draw < 0.8) {
    std::string person;
    do {
      person = std::string(kPeople[rng.index(kPeople.size())]);
    } while (used_people.count(person) > 0);
    f.person = person;
  } else {
    std::string other;
    do {
      other = std::string(kPlaces[rng.index(kPlaces.size())]);
    } while (other == place);
    f.place = other;
  }
}

struct HypothesisPlan {
  std::vector<std::size_t> sources;
  bool corrupted = false;
  bool verbatim = false;
};

constexpr int kMaxAttempts = 8;

std::string render_hypothesis(const HypothesisPlan& plan, const std::vector<Frame>& premise,
                              const std::set<std::string>& people, const std::string& place,
                              int figure, Rng& rng) {
  std::vector<Frame> parts;
  for (std::size_t s : plan.sources) parts.push_back(premise[s]);
  if (!plan.verbatim) {
    for (auto& part : parts) substitute_one(part, rng);
  }
  if (plan.corrupted) corrupt(parts[rng.index(parts.size())], people, place, figure, rng);
  std::string text = render(parts.front(), false);
  if (parts.size() == 2) {
    text.pop_back();  // drop the period before joining
    text += ", and " + render(parts.back(), true);
  }
  return text;
}

bool sources_outrank(const TokenSeq& hypothesis, const std::vector<std::size_t>& sources,
                     const std::vector<TokenSeq>& premise) {
  double weakest_source = 2.0, strongest_other = -1.0;
  for (std::size_t i = 0; i < premise.size(); ++i) {
    const double score = rouge1_score(hypothesis, premise[i]);
    if (std::find(sources.begin(), sources.end(), i) != sources.end()) {
      weakest_source = std::min(weakest_source, score);
    } else {
      strongest_other = std::max(strongest_other, score);
    }
  }
  return weakest_source > strongest_other;
}

AnnotatedSample generate_sample(const SyntheticConfig& config, const std::string& id, Rng& rng) {
  const std::size_t premise_len = static_cast<std::size_t>(
      rng.between(static_cast<int>(config.min_premise_sentences),
                  static_cast<int>(config.max_premise_sentences)));
  const std::size_t hypothesis_len = static_cast<std::size_t>(
      rng.between(static_cast<int>(config.min_hypothesis_sentences),
                  static_cast<int>(config.max_hypothesis_sentences)));

  std::set<std::string> people;
  std::vector<std::string> cast;
  while (cast.size() < config.people_per_document) {
    std::string p(kPeople[rng.index(kPeople.size())]);
    if (people.insert(p).second) cast.push_back(p);
  }
  const std::string place(kPlaces[rng.index(kPlaces.size())]);
  const int figure = rng.between(2, 950);

  Deck verbs(kVerbs.size(), rng), adjectives(kAdjectives.size(), rng), nouns(kNouns.size(), rng);
  std::vector<Frame> premise(premise_len);
  std::string premise_text;
  for (auto& f : premise) {
    f.tmpl = rng.index(kTemplates.size());
    f.person = cast[rng.index(cast.size())];
    f.place = place;
    f.figure = figure;
    f.verb = verbs.draw();
    f.adjective = adjectives.draw();
    f.noun = nouns.draw();
    if (!premise_text.empty()) premise_text += ' ';
    premise_text += render(f, false);
  }

  std::vector<HypothesisPlan> plans(hypothesis_len);
  Deck sources(premise_len, rng);
  for (auto& plan : plans) {
    plan.sources.push_back(sources.draw());
    if (rng.bernoulli(config.two_source_rate)) {
      std::size_t second = sources.draw();
      if (second == plan.sources.front()) second = sources.draw();
      if (second != plan.sources.front()) plan.sources.push_back(second);
    }
    std::sort(plan.sources.begin(), plan.sources.end());
  }
  std::sort(plans.begin(), plans.end(),
            [](const HypothesisPlan& a, const HypothesisPlan& b) { return a.sources < b.sources; });

  const bool corrupted_document = rng.bernoulli(config.corruption_rate);
  if (corrupted_document) {
    const std::size_t count = std::min<std::size_t>(hypothesis_len, rng.bernoulli(0.3) ? 2 : 1);
    std::vector<std::size_t> which(hypothesis_len);
    std::iota(which.begin(), which.end(), 0);
    rng.shuffle(which);
    for (std::size_t c = 0; c < count; ++c) plans[which[c]].corrupted = true;
  }

  AnnotatedSample sample;
  sample.pair.id = id;
  sample.pair.premise = premise_text;
  sample.pair.label = corrupted_document ? Label::kNotEntailment : Label::kEntailment;
  std::vector<TokenSeq> premise_tokens;
  for (const auto& f : premise) premise_tokens.push_back(tokenize(render(f, false)));

  std::string hypothesis_text;
  for (auto& plan : plans) {
    plan.verbatim = !plan.corrupted && plan.sources.size() == 1 && rng.bernoulli(config.verbatim_rate);
    std::string text;
    // Redraw until the sources strictly outrank every other premise sentence
    // under ROUGE-1, falling back to a single source; top-K retrieval with
    // K >= 2 then always recovers the gold group.
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxAttempts && plan.sources.size() == 2) {
        plan.sources.pop_back();
        attempt = 0;
      }
      text = render_hypothesis(plan, premise, people, place, figure, rng);
      if (plan.verbatim || sources_outrank(tokenize(text), plan.sources, premise_tokens)) break;
      if (attempt >= 4 * kMaxAttempts) {
        throw Error(ErrorCode::kValidation, "cannot derive a retrievable hypothesis for '" + id + "'");
      }
    }
    AnnotatedSentence sentence;
    sentence.text = text;
    sentence.label = plan.corrupted ? Label::kNotEntailment : Label::kEntailment;
    sentence.evidence_groups.push_back(plan.sources);
    sample.hypothesis_sentences.push_back(std::move(sentence));
    if (!hypothesis_text.empty()) hypothesis_text += ' ';
    hypothesis_text += text;
  }
  sample.pair.hypothesis = hypothesis_text;

  // the segmenter must recover exactly the generated sentences
  const SentenceList hyp_split = split_sentences(sample.pair.hypothesis);
  const SentenceList premise_split = split_sentences(sample.pair.premise);
  bool aligned = hyp_split.size() == sample.hypothesis_sentences.size() &&
                 premise_split.size() == premise_len;
  for (std::size_t i = 0; aligned && i < hyp_split.size(); ++i) {
    aligned = hyp_split[i] == sample.hypothesis_sentences[i].text;
  }
  if (!aligned) {
    throw Error(ErrorCode::kValidation, "synthetic sample '" + id + "' does not re-segment cleanly");
  }
  sample.validate(premise_len);
  return sample;
}

}  // namespace

void SyntheticConfig::validate() const {
  if (train_size < 1 || dev_size < 1 || test_size < 1) {
    throw Error(ErrorCode::kValidation, "synthetic split sizes must be >= 1");
  }
  if (!(corruption_rate >= 0.0 && corruption_rate <= 1.0)) {
    throw Error(ErrorCode::kValidation, "corruption rate must lie in [0,1]");
  }
  if (min_premise_sentences < 2 || min_premise_sentences > max_premise_sentences) {
    throw Error(ErrorCode::kValidation, "bad premise length range");
  }
  if (min_hypothesis_sentences < 1 || min_hypothesis_sentences > max_hypothesis_sentences) {
    throw Error(ErrorCode::kValidation, "bad hypothesis length range");
  }
  if (people_per_document < 1 || people_per_document + 1 > kPeople.size()) {
    throw Error(ErrorCode::kValidation, "people_per_document out of range");
  }
}

SyntheticSplit generate_synthetic_split(const SyntheticConfig& config, std::size_t size,
                                        const std::string& id_prefix, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  SyntheticSplit split;
  for (std::size_t i = 0; i < size; ++i) {
    std::string number = std::to_string(i);
    number.insert(0, number.size() < 5 ? 5 - number.size() : 0, '0');
    AnnotatedSample sample = generate_sample(config, id_prefix + "-" + number, rng);
    split.pairs.push_back(sample.pair);
    split.gold.push_back(std::move(sample));
  }
  return split;
}

SyntheticCorpus generate_synthetic(const SyntheticConfig& config) {
  config.validate();
  const auto split_seed = [&](std::string_view name) { return fnv1a64(name, config.seed); };
  SyntheticCorpus corpus;
  corpus.train = generate_synthetic_split(config, config.train_size, "train", split_seed("train"));
  corpus.dev = generate_synthetic_split(config, config.dev_size, "dev", split_seed("dev"));
  corpus.test = generate_synthetic_split(config, config.test_size, "test", split_seed("test"));
  return corpus;
}

}  // namespace r2f
