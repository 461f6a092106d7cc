#pragma once
// Sequence files: single-line digit text or one byte per symbol.

#include <filesystem>
#include <string>

#include "mmd/core.hpp"

namespace mmd {

enum class SequenceFormat { text, binary };

Sequence read_sequence(const std::filesystem::path& path, SequenceFormat fmt, int m);
void write_sequence(const std::filesystem::path& path, const Sequence& seq, SequenceFormat fmt);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace mmd
