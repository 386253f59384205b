#pragma once

// Locale-independent numeric formatting (12 significant digits everywhere)
// and a minimal CSV assembler. Machine output is built as strings first so
// determinism checks can compare byte-for-byte.

#include <charconv>
#include <complex>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace qvar {

/// %.12g equivalent via to_chars: no locale, no trailing noise.
inline std::string fmt_g12(double v) {
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

inline std::string fmt_complex12(std::complex<double> z) {
    std::string s = fmt_g12(z.real());
    s += (z.imag() < 0.0 ? " - " : " + ") + fmt_g12(std::abs(z.imag())) + "i";
    return s;
}

class CsvBuilder {
  public:
    explicit CsvBuilder(std::vector<std::string> header) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out_ += ',';
            out_ += header[i];
        }
        out_ += '\n';
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ += ',';
            out_ += cells[i];
        }
        out_ += '\n';
    }
    const std::string& str() const { return out_; }
    void write(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + path);
        os << out_;
    }

  private:
    std::string out_;
};

}  // namespace qvar
