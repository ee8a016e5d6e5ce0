#include "synimp/lexicon.hpp"

#include "synimp/rng.hpp"

namespace synimp::lexicon {
namespace {

constexpr std::string_view kHigh[] = {
    "the", "of", "and", "to", "in", "a", "is", "that", "for", "it", "as", "was", "with",
    "be", "by", "on", "not", "he", "i", "this", "are", "or", "his", "from", "at", "which",
    "but", "have", "an", "they", "you", "were", "her", "she", "there", "been", "one",
    "all", "we", "their", "has", "would", "when", "if", "so", "no", "will", "can", "more",
    "about", "up", "out", "them", "some", "could", "what", "into", "than", "then", "its",
    "only", "other", "new", "time", "two", "may", "first", "any", "like", "now", "my",
    "also", "just", "over", "such", "our", "most", "after", "should", "even", "because",
    "these", "those", "how", "many", "where", "well", "much", "very", "down", "own",
    "still", "way", "back", "through", "while", "here", "both", "each", "made", "since",
    "under", "between", "same", "another",
};

constexpr std::string_view kMid[] = {
    "people", "world", "country", "life", "house", "city", "place", "night", "morning",
    "summer", "winter", "family", "friend", "school", "street", "village", "river",
    "garden", "window", "table", "letter", "music", "song", "story", "memory", "voice",
    "road", "light", "water", "field", "market", "church", "harbor", "station", "bridge",
    "mountain", "island", "forest", "valley", "coast", "season", "journey", "evening",
    "moment", "child", "mother", "father", "brother", "sister", "teacher", "worker",
    "farmer", "leader", "nation", "council", "project", "program", "budget", "policy",
    "plan", "law", "reform", "service", "network", "energy", "future", "history",
    "culture", "tradition", "community", "region", "border", "trade", "union", "treaty",
    "partner", "visit", "meeting", "crowd", "square", "hall", "office", "factory",
    "railway", "hospital", "library", "museum", "theater", "festival", "holiday",
    "kitchen", "bread", "coffee", "photograph", "radio", "newspaper", "harvest",
};

constexpr std::string_view kLow[] = {
    "lantern", "orchard", "meadow", "cobblestone", "tramway", "gazebo", "bandstand",
    "chimney", "porch", "attic", "cellar", "ferry", "lighthouse", "quarry", "mill",
    "bakery", "apothecary", "haberdasher", "telegraph", "gramophone", "carousel",
    "pavilion", "promenade", "boulevard", "courtyard", "fountain", "steeple", "belfry",
    "pasture", "hedgerow", "thicket", "brook", "creek", "estuary", "glacier", "plateau",
    "canyon", "savanna", "tundra", "monsoon", "drizzle", "twilight", "dawn", "dusk",
    "midnight", "solstice", "equinox", "almanac", "ledger", "charter", "accord", "summit",
    "delegation", "embassy", "consulate", "envoy", "protocol", "tariff", "quota",
    "subsidy", "mandate", "referendum", "assembly", "senate", "cabinet", "ministry",
    "province", "municipality", "parish", "borough", "hamlet", "township", "frontier",
    "corridor", "junction", "viaduct", "aqueduct", "reservoir", "granary", "silo",
    "foundry", "workshop", "atelier", "studio", "gallery", "archive", "manuscript",
    "parchment", "quill", "compass", "sextant", "anchor", "rudder", "mast", "sail",
    "voyage", "caravan",
};

}  // namespace

std::span<const std::string_view> high() { return kHigh; }
std::span<const std::string_view> mid() { return kMid; }
std::span<const std::string_view> low() { return kLow; }

std::string_view pick(std::uint64_t key) {
  std::uint64_t h = splitmix64(key);
  std::uint64_t stratum = h % 10;
  std::uint64_t r = splitmix64(h) >> 8;
  if (stratum < 6) return kHigh[r % std::size(kHigh)];
  if (stratum < 9) return kMid[r % std::size(kMid)];
  return kLow[r % std::size(kLow)];
}

}  // namespace synimp::lexicon
