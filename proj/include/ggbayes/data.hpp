#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "ggbayes/dataset.hpp"

namespace ggbayes {

/// Input data problems: missing file, unparsable or non-positive values.
class DataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The 30 industrial lifetimes of Meeker and Escobar (1998), in the printed order.
std::span<const double> meeker_values();

/// "meeker" selects the builtin dataset; anything else is a path to a file
/// with one positive value per line, optionally headed by "t". Blank lines
/// and lines starting with '#' are skipped. Errors name the line.
Dataset load_dataset(const std::string& source);

/// Parses file contents; `name` is used in error messages.
Dataset parse_dataset(const std::string& text, const std::string& name);

}  // namespace ggbayes
