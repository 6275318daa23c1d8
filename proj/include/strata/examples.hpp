// Bundled example instances, each with the list of commands it demonstrates.
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace strata {

struct BundledExample {
  std::string name;
  std::string text;                    // canonical instance text
  std::vector<std::string> commands;   // commands run by `example <name>`
};

const std::vector<BundledExample>& bundled_examples();
const BundledExample* find_bundled_example(const std::string& name);

}  // namespace strata
