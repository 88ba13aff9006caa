// SPDX-License-Identifier: Apache-2.0
#include "kbgen/corpus/synth.hpp"

#include <array>
#include <set>

#include "kbgen/errors.hpp"
#include "kbgen/numkit/rng.hpp"

namespace kbgen::corpus {

namespace {

constexpr std::array kFirstNames = {
    "Silvi", "Amir", "Noa", "Tomas", "Lena", "Marco", "Ines", "Jonas", "Maya", "Pavel",
    "Sofia", "Karim", "Elena", "Dario", "Yael", "Luca", "Hana", "Viktor", "Irene", "Mateo",
    "Olga", "Rafael", "Nadia", "Emil", "Clara", "Idan", "Petra", "Bruno", "Leah", "Stefan",
    "Anya", "Hugo", "Mira", "Oskar", "Talia", "Nico", "Greta", "Ravid", "Alma", "Felix"};
constexpr std::array kLastNames = {
    "Jan", "Levi", "Moreau", "Novak", "Rossi", "Berg", "Costa", "Kovacs", "Haddad", "Lindqvist",
    "Ferreira", "Mizrahi", "Dvorak", "Santos", "Weber", "Ortega", "Peretz", "Nyberg", "Marin", "Katz",
    "Sorensen", "Almeida", "Horvat", "Bianchi", "Keller", "Shapira", "Vidal", "Jansen", "Kaplan", "Ruiz",
    "Brandt", "Ivanova", "Amsalem", "Castro", "Holm", "Fischer", "Navarro", "Gabay", "Lund", "Morales"};
constexpr std::array kMonths = {"January", "February", "March",     "April",   "May",      "June",
                                "July",    "August",   "September", "October", "November", "December"};
constexpr std::array kCountries = {
    "Israel",  "Germany", "France",   "Spain",   "Italy",   "Portugal", "Brazil",  "Argentina", "Sweden",
    "Norway",  "Denmark", "Poland",   "Hungary", "Croatia", "Serbia",   "Greece",  "Turkey",    "Egypt",
    "Nigeria", "Ghana",   "Mexico",   "Chile",   "Japan",   "Austria",  "Belgium"};
constexpr std::array kCities = {
    "Haifa",   "Ashdod",   "Holon",    "Netanya", "Eilat",    "Hadera",   "Lyon",    "Nantes",  "Porto",   "Braga",
    "Sevilla", "Bilbao",   "Torino",   "Parma",   "Malmo",    "Bergen",   "Aarhus",  "Krakow",  "Gdansk",  "Split",
    "Zagreb",  "Athens",   "Izmir",    "Cairo",   "Accra",    "Lagos",    "Recife",  "Rosario", "Osaka",   "Graz"};
constexpr std::array kClubSuffixes = {"FC", "United", "Athletic", "Rovers"};
constexpr std::array kPositions = {"goalkeeper", "defender", "midfielder", "forward"};

std::string draw_value(ValuePool pool, numkit::Rng& rng) {
  switch (pool) {
    case ValuePool::person_name:
      return std::string(rng.pick(kFirstNames)) + " " + rng.pick(kLastNames);
    case ValuePool::date:
      return std::to_string(rng.between(1, 28)) + " " + rng.pick(kMonths) + " " +
             std::to_string(rng.between(1960, 2001));
    case ValuePool::country:
      return rng.pick(kCountries);
    case ValuePool::team:
      return std::string(rng.pick(kCities)) + " " + rng.pick(kClubSuffixes);
    case ValuePool::position:
      return rng.pick(kPositions);
    case ValuePool::appearances:
      return std::to_string(rng.between(1, 150));
    case ValuePool::goals:
      return std::to_string(rng.between(0, 60));
  }
  throw UsageError("unknown value pool");
}

std::string fill(const std::string& tmpl, const std::string& value) {
  const auto at = tmpl.find("{value}");
  if (at == std::string::npos) return tmpl;
  return tmpl.substr(0, at) + value + tmpl.substr(at + 7);
}

const std::string& pick_sentence(const SlotSpec& slot, int occurrence, int count) {
  const auto& s = slot.sentences;
  if (occurrence == 0 || s.size() == 1) return s.front();
  if (occurrence == count - 1) return s.back();
  return s[std::min<std::size_t>(1, s.size() - 1)];
}

}  // namespace

double Schema::expected_slots() const {
  double total = 0.0;
  for (const auto& s : slots) {
    double per_row = 1.0;
    for (const auto& sub : s.sub_slots) per_row += sub.probability;
    total += s.presence * 0.5 * (s.min_rows + s.max_rows) * per_row;
  }
  return total;
}

Schema person_schema() {
  Schema s;
  s.name = "person";
  s.min_slots_per_table = 3.0;
  s.max_slots_per_table = 10.0;
  s.slots = {
      {"Name", ValuePool::person_name, 1, 1, 1.0, {"{value} is a professional footballer"}, {}},
      {"Member of sports team",
       ValuePool::team,
       1,
       4,
       1.0,
       {"he began his career at {value}", "he then joined {value}", "he later played for {value}"},
       {{"Matches played", ValuePool::appearances, 0.5, "appearing in {value} matches"},
        {"Goals scored", ValuePool::goals, 0.4, "scoring {value} goals"}}},
      {"Date of birth", ValuePool::date, 1, 1, 1.0, {"he was born on {value}"}, {}},
      {"Country of citizenship", ValuePool::country, 1, 1, 1.0, {"he is a citizen of {value}"}, {}},
      {"Position played on team", ValuePool::position, 1, 1, 0.7, {"he plays as a {value}"}, {}},
  };
  return s;
}

std::vector<Example> synth_corpus(int n_entities, std::uint64_t seed, const Schema& schema) {
  if (schema.slots.empty()) throw UsageError("synthetic schema has no slot types");
  if (n_entities < 1) throw UsageError("n_entities must be >= 1");
  for (const auto& slot : schema.slots) {
    if (slot.sentences.empty()) throw UsageError("slot '" + slot.type + "' has no sentence template");
    if (slot.min_rows < 1 || slot.max_rows < slot.min_rows) {
      throw UsageError("slot '" + slot.type + "' has an invalid row range");
    }
  }

  numkit::Rng master(seed);
  std::vector<Example> out;
  out.reserve(static_cast<std::size_t>(n_entities));
  for (int e = 0; e < n_entities; ++e) {
    numkit::Rng rng = master.split();
    std::set<std::string> used;
    auto fresh = [&](ValuePool pool) {
      for (int attempt = 0; attempt < 1000; ++attempt) {
        auto v = draw_value(pool, rng);
        if (used.insert(v).second) return v;
      }
      throw UsageError("value pool exhausted while drawing distinct values");
    };

    std::vector<SlotInput> slots;
    std::string text;
    int row = 0;
    for (std::size_t k = 0; k < schema.slots.size(); ++k) {
      const auto& slot = schema.slots[k];
      // The first slot is always present so every KB is non-empty.
      if (k > 0 && slot.presence < 1.0 && !rng.bernoulli(slot.presence)) continue;
      const int count = static_cast<int>(rng.between(slot.min_rows, slot.max_rows));
      for (int occ = 0; occ < count; ++occ) {
        ++row;
        const auto value = fresh(slot.pool);
        slots.push_back({slot.type, value, row});
        std::string sentence = fill(pick_sentence(slot, occ, count), value);
        std::vector<std::string> clauses;
        for (const auto& sub : slot.sub_slots) {
          if (!rng.bernoulli(sub.probability)) continue;
          const auto sub_value = fresh(sub.pool);
          slots.push_back({sub.type, sub_value, row});
          clauses.push_back(fill(sub.clause, sub_value));
        }
        for (std::size_t c = 0; c < clauses.size(); ++c) sentence += (c == 0 ? " , " : " and ") + clauses[c];
        if (!text.empty()) text += ' ';
        text += sentence + " .";
      }
    }
    auto kb = make_kb(schema.name + "-" + std::to_string(seed) + "-" + std::to_string(e), slots);
    out.push_back(make_example(std::move(kb), std::move(text)));
  }
  return out;
}

}  // namespace kbgen::corpus
