#include "pfc/cli/io.hpp"

#include "pfc/errors.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

namespace pfc::cli {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_series_csv(const std::filesystem::path& path, const std::vector<Eigen::VectorXd>& series) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "time_index,node_index,value\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        for (Eigen::Index i = 0; i < series[k].size(); ++i) {
            out << k << ',' << i << ',' << format_double(series[k][i]) << '\n';
        }
    }
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::vector<Eigen::VectorXd> read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != "time_index,node_index,value") {
        throw InvalidArgument("'" + path.string() + "': expected header time_index,node_index,value");
    }
    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::size_t k = 0, i = 0;
        double v = 0.0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(line);
        if (!(ss >> k >> c1 >> i >> c2) || c1 != ',' || c2 != ',') {
            throw InvalidArgument("'" + path.string() + "' line " + std::to_string(lineno) + ": malformed row");
        }
        std::string rest;
        std::getline(ss, rest);
        // strtod rather than stod: subnormals must round-trip too
        char* end = nullptr;
        v = std::strtod(rest.c_str(), &end);
        if (rest.empty() || end != rest.c_str() + rest.size()) {
            throw InvalidArgument("'" + path.string() + "' line " + std::to_string(lineno) + ": bad value");
        }
        if (k >= rows.size()) rows.resize(k + 1);
        if (i != rows[k].size()) {
            throw InvalidArgument("'" + path.string() + "' line " + std::to_string(lineno) + ": rows out of order");
        }
        rows[k].push_back(v);
    }
    std::vector<Eigen::VectorXd> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size())));
    return out;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error("cannot write '" + path.string() + "'");
}

std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) {
        throw Error("sha256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

}  // namespace pfc::cli
