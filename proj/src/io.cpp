#include "mmd/io.hpp"

#include <fstream>
#include <sstream>

namespace mmd {

Sequence read_sequence(const std::filesystem::path& path, SequenceFormat fmt, int m) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    Sequence seq;
    if (fmt == SequenceFormat::text) {
        std::string line;
        std::getline(in, line);
        seq = tuple_from_string(line, m);
    } else {
        char c;
        while (in.get(c)) {
            Symbol s = static_cast<unsigned char>(c);
            if (s >= m) throw InvalidRangeError("symbol out of alphabet range");
            seq.push_back(s);
        }
    }
    return seq;
}

void write_sequence(const std::filesystem::path& path, const Sequence& seq, SequenceFormat fmt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    if (fmt == SequenceFormat::text) {
        out << tuple_to_string(seq) << '\n';
    } else {
        for (Symbol s : seq) out.put(static_cast<char>(static_cast<unsigned char>(s)));
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << content;
}

}  // namespace mmd
