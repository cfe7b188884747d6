#include "config.hpp"

#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "ranking.hpp"

namespace dret {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    std::uint64_t out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": expected a non-negative integer, got '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": expected a number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument(key + ": expected true/false, got '" + v + "'");
}

}  // namespace

void PipelineConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (embed_dim < 1) fail("embed_dim must be >= 1");
  if (utt_hidden < 1) fail("utt_hidden must be >= 1");
  if (ctx_hidden < 1) fail("ctx_hidden must be >= 1");
  if (dec_hidden < 1) fail("dec_hidden must be >= 1");
  if (min_count < 1) fail("min_count must be >= 1");
  if (delimiter.empty()) fail("delimiter must be nonempty");
  if (learning_rate < 0.0) fail("learning_rate must be >= 0");
  if (grad_clip <= 0.0) fail("grad_clip must be > 0");
  if (trees < 1) fail("trees must be >= 1");
  if (max_label_len < 1) fail("max_label_len must be >= 1");
  try {
    rank::parse_method(method);
  } catch (const std::exception&) {
    fail("method must be one of CR, AR, CAR");
  }
  if (candidates < 1) fail("candidates must be >= 1");
  if (car_pool < 1 || car_pool > candidates) fail("car_pool must satisfy 1 <= n <= candidates");
  if (eval_options < 2) fail("eval_options must be >= 2");
  if (beams < 1) fail("beams must be >= 1");
  if (max_gen_len < 1) fail("max_gen_len must be >= 1");
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  if (key == "embed_dim") embed_dim = parse_u64(key, value);
  else if (key == "utt_hidden") utt_hidden = parse_u64(key, value);
  else if (key == "ctx_hidden") ctx_hidden = parse_u64(key, value);
  else if (key == "dec_hidden") dec_hidden = parse_u64(key, value);
  else if (key == "min_count") min_count = static_cast<int>(parse_u64(key, value));
  else if (key == "min_turns") min_turns = parse_u64(key, value);
  else if (key == "delimiter") delimiter = value;
  else if (key == "anonymize") anonymize = parse_bool(key, value);
  else if (key == "split_punctuation") split_punctuation = parse_bool(key, value);
  else if (key == "learning_rate") learning_rate = parse_double(key, value);
  else if (key == "epochs") epochs = parse_u64(key, value);
  else if (key == "grad_clip") grad_clip = parse_double(key, value);
  else if (key == "train_seed") train_seed = parse_u64(key, value);
  else if (key == "trees") trees = parse_u64(key, value);
  else if (key == "max_label_len") max_label_len = parse_u64(key, value);
  else if (key == "forest_seed") forest_seed = parse_u64(key, value);
  else if (key == "method") method = value;
  else if (key == "candidates") candidates = parse_u64(key, value);
  else if (key == "car_pool") car_pool = parse_u64(key, value);
  else if (key == "eval_options") eval_options = parse_u64(key, value);
  else if (key == "eval_seed") eval_seed = parse_u64(key, value);
  else if (key == "beams") beams = parse_u64(key, value);
  else if (key == "max_gen_len") max_gen_len = parse_u64(key, value);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

void PipelineConfig::load(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not 'key = value'");
    }
    set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  PipelineConfig cfg;
  cfg.load(in);
  return cfg;
}

}  // namespace dret
