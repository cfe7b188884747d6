// Generates the templated support-chat corpus used by the demo walkthrough
// and the end-to-end tests: 20 topics, 6 alternating turns per dialogue,
// seeded and fully reproducible.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rng.hpp"

namespace {

const char* kTopics[20][8] = {
    {"router", "wifi", "signal", "reboot", "channel", "bandwidth", "antenna", "modem"},
    {"printer", "toner", "paper", "tray", "spooler", "cartridge", "queue", "inkjet"},
    {"battery", "drain", "percent", "saver", "overheat", "charging", "cell", "powerbank"},
    {"invoice", "billing", "refund", "payment", "subscription", "fee", "discount", "overdue"},
    {"password", "login", "reset", "unlock", "credentials", "username", "twofactor", "lockout"},
    {"screen", "display", "pixel", "brightness", "flicker", "crack", "backlight", "resolution"},
    {"keyboard", "keys", "typing", "shortcut", "layout", "spacebar", "numpad", "keystroke"},
    {"camera", "lens", "photo", "focus", "blur", "megapixel", "shutter", "gallery"},
    {"speaker", "volume", "audio", "mute", "distortion", "bass", "headphone", "jack"},
    {"simcard", "roaming", "network", "carrier", "coverage", "activation", "apn", "prepaid"},
    {"storage", "memory", "gigabyte", "cache", "files", "cleanup", "sdcard", "capacity"},
    {"bluetooth", "pairing", "device", "discovery", "handsfree", "earbuds", "dongle", "proximity"},
    {"email", "inbox", "spam", "attachment", "mailbox", "folder", "signature", "forwarding"},
    {"browser", "tabs", "bookmark", "cookies", "homepage", "extension", "popup", "download"},
    {"update", "upgrade", "version", "patch", "installer", "changelog", "rollback", "beta"},
    {"voicemail", "greeting", "messages", "dialpad", "callback", "missed", "recording", "notification"},
    {"contract", "renewal", "cancellation", "clause", "termination", "penalty", "loyalty", "tenure"},
    {"delivery", "shipping", "parcel", "tracking", "courier", "warehouse", "dispatch", "address"},
    {"insurance", "claim", "damage", "warranty", "replacement", "deductible", "premium", "repair"},
    {"hotspot", "tethering", "data", "limit", "throttle", "usage", "allowance", "megabit"},
};

std::string fill(const std::string& tpl, const std::string slots[4], const std::string& number) {
  std::string out;
  for (std::size_t i = 0; i < tpl.size(); ++i) {
    if (tpl[i] == '%' && i + 1 < tpl.size()) {
      char c = tpl[i + 1];
      if (c >= '0' && c <= '3') {
        out += slots[c - '0'];
        ++i;
        continue;
      }
      if (c == 'd') {
        out += number;
        ++i;
        continue;
      }
    }
    out += tpl[i];
  }
  return out;
}

std::string make_dialogue(dret::Rng& rng, std::size_t topic) {
  static const std::vector<std::string> open = {
      "hello i have a problem with my %0",
      "hi my %0 is not working",
      "hello the %0 keeps failing with error %d",
      "hi i need help with the %0",
  };
  static const std::vector<std::string> clarify = {
      "do you mean the %1 of the %0",
      "what does the %0 show about the %1",
      "can you check the %1 on your %0",
  };
  static const std::vector<std::string> detail = {
      "yes the %1 shows %2 trouble",
      "the %0 still has %2 issues",
      "i see the %2 and the %1 is wrong",
  };
  static const std::vector<std::string> solution = {
      "please try the %3 and check the %0 again",
      "you should adjust the %3 to fix the %0",
      "try restarting the %3 then the %0",
  };
  static const std::vector<std::string> ack = {
      "thanks the %0 works now",
      "great that fixed the %0",
      "ok the %0 is fine now thanks",
  };
  static const std::vector<std::string> close = {
      "glad the %0 is fixed goodbye",
      "happy to help with the %0 goodbye",
      "you are welcome enjoy the %0",
  };

  // four distinct topic words per dialogue
  std::size_t picks[8] = {0, 1, 2, 3, 4, 5, 6, 7};
  for (std::size_t j = 0; j < 4; ++j) {
    std::size_t k = j + rng.index(8 - j);
    std::swap(picks[j], picks[k]);
  }
  std::string slots[4];
  for (std::size_t j = 0; j < 4; ++j) slots[j] = kTopics[topic][picks[j]];
  std::string number = std::to_string(100 + rng.index(900));

  auto pick = [&](const std::vector<std::string>& v) { return fill(v[rng.index(v.size())], slots, number); };

  std::string line;
  const char* tags[6] = {"A:", "B:", "A:", "B:", "A:", "B:"};
  const std::vector<std::string>* parts[6] = {&open, &clarify, &detail, &solution, &ack, &close};
  for (int u = 0; u < 6; ++u) {
    if (u > 0) line += " ";
    line += tags[u];
    line += " ";
    line += pick(*parts[u]);
    line += " __eou__";
  }
  return line;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generate the templated 20-topic demo corpus"};
  std::string train_path, heldout_path;
  std::size_t train_dialogues = 2000;
  std::size_t heldout_dialogues = 200;
  std::uint64_t seed = 7;
  app.add_option("--train", train_path, "training corpus output")->required();
  app.add_option("--heldout", heldout_path, "held-out corpus output")->required();
  app.add_option("--dialogues", train_dialogues, "training dialogue count");
  app.add_option("--heldout-dialogues", heldout_dialogues, "held-out dialogue count");
  app.add_option("--seed", seed);
  CLI11_PARSE(app, argc, argv);

  dret::Rng rng(seed);
  std::ofstream train(train_path, std::ios::binary);
  if (!train) {
    std::cerr << "cannot open " << train_path << "\n";
    return 1;
  }
  for (std::size_t i = 0; i < train_dialogues; ++i) {
    train << make_dialogue(rng, i % 20) << "\n";
  }
  std::ofstream heldout(heldout_path, std::ios::binary);
  if (!heldout) {
    std::cerr << "cannot open " << heldout_path << "\n";
    return 1;
  }
  for (std::size_t i = 0; i < heldout_dialogues; ++i) {
    heldout << make_dialogue(rng, i % 20) << "\n";
  }
  std::cout << "wrote " << train_dialogues << " training and " << heldout_dialogues
            << " held-out dialogues\n";
  return 0;
}
