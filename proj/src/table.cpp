#include "discop/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <vector>

namespace discop {

std::string fraction_string(double v) {
    for (int den = 1; den <= 256; ++den) {
        const double scaled = v * den;
        const double num = std::nearbyint(scaled);
        if (std::fabs(scaled - num) <= 1e-12 * den && std::fabs(v - num / den) <= 1e-12) {
            long p = static_cast<long>(num);
            long q = den;
            const long g = std::gcd(std::labs(p), q);
            if (g > 1) {
                p /= g;
                q /= g;
            }
            if (q == 1) return std::to_string(p);
            return std::to_string(p) + "/" + std::to_string(q);
        }
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

std::string pad_left(const std::string& s, std::size_t width) {
    if (s.size() >= width) return s;
    return std::string(width - s.size(), ' ') + s;
}

// Bordered 2-D layout: rows are dimension 1 with the row marginal p1 on the
// right, columns are dimension 2 with the column marginal p2 at the bottom.
std::string render_2d(const JointPmf& joint) {
    const int z1 = joint.shape()[0];
    const int z2 = joint.shape()[1];
    const Marginal p1 = joint.marginal_of(1);
    const Marginal p2 = joint.marginal_of(2);

    std::vector<std::vector<std::string>> cells(static_cast<std::size_t>(z1 + 2),
                                                std::vector<std::string>(static_cast<std::size_t>(z2 + 2)));
    cells[0][0] = "";
    for (int s2 = 1; s2 <= z2; ++s2) cells[0][static_cast<std::size_t>(s2)] = std::to_string(s2);
    cells[0][static_cast<std::size_t>(z2 + 1)] = "p1";
    for (int s1 = 1; s1 <= z1; ++s1) {
        cells[static_cast<std::size_t>(s1)][0] = std::to_string(s1);
        for (int s2 = 1; s2 <= z2; ++s2) {
            const int idx[2] = {s1, s2};
            cells[static_cast<std::size_t>(s1)][static_cast<std::size_t>(s2)] = fraction_string(joint.mass_at(idx));
        }
        cells[static_cast<std::size_t>(s1)][static_cast<std::size_t>(z2 + 1)] = fraction_string(p1.prob(s1));
    }
    cells[static_cast<std::size_t>(z1 + 1)][0] = "p2";
    for (int s2 = 1; s2 <= z2; ++s2)
        cells[static_cast<std::size_t>(z1 + 1)][static_cast<std::size_t>(s2)] = fraction_string(p2.prob(s2));
    cells[static_cast<std::size_t>(z1 + 1)][static_cast<std::size_t>(z2 + 1)] = "";

    std::vector<std::size_t> width(static_cast<std::size_t>(z2 + 2), 0);
    for (const auto& row : cells)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

    std::ostringstream out;
    for (int r = 0; r < z1 + 2; ++r) {
        std::string line;
        for (int c = 0; c < z2 + 2; ++c) {
            if (c == z2 + 1) line += " |";
            if (c > 0) line.push_back(' ');
            line += pad_left(cells[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)], width[static_cast<std::size_t>(c)]);
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << '\n';
        if (r == 0 || r == z1) {
            std::size_t rule = 0;
            for (std::size_t c = 0; c < width.size(); ++c) rule += width[c] + 1;
            out << std::string(rule + 1, '-') << '\n';
        }
    }
    return out.str();
}

std::string render_1d(const JointPmf& joint) {
    std::ostringstream out;
    std::size_t w = 0;
    std::vector<std::string> vals;
    for (int s = 1; s <= joint.shape()[0]; ++s) {
        const int idx[1] = {s};
        vals.push_back(fraction_string(joint.mass_at(idx)));
        w = std::max(w, vals.back().size());
    }
    for (int s = 1; s <= joint.shape()[0]; ++s)
        out << pad_left(std::to_string(s), 3) << "  " << pad_left(vals[static_cast<std::size_t>(s - 1)], w) << '\n';
    return out.str();
}

} // namespace

std::string render_table(const JointPmf& joint) {
    const int n = joint.dims();
    if (n == 1) return render_1d(joint);
    if (n == 2) return render_2d(joint);

    // Higher dimensions: one 2-D slice per combination of the trailing
    // coordinates, rendered without marginal borders.
    std::ostringstream out;
    const std::vector<int>& shape = joint.shape();
    std::vector<int> tail(static_cast<std::size_t>(n - 2), 1);
    for (;;) {
        out << "slice (";
        for (int i = 0; i < n - 2; ++i) {
            if (i) out << ", ";
            out << "s" << (i + 3) << "=" << tail[static_cast<std::size_t>(i)];
        }
        out << ")\n";
        std::vector<std::vector<std::string>> cells(static_cast<std::size_t>(shape[0] + 1),
                                                    std::vector<std::string>(static_cast<std::size_t>(shape[1] + 1)));
        for (int s2 = 1; s2 <= shape[1]; ++s2) cells[0][static_cast<std::size_t>(s2)] = std::to_string(s2);
        std::vector<int> idx(static_cast<std::size_t>(n));
        for (int i = 0; i < n - 2; ++i) idx[static_cast<std::size_t>(i + 2)] = tail[static_cast<std::size_t>(i)];
        for (int s1 = 1; s1 <= shape[0]; ++s1) {
            cells[static_cast<std::size_t>(s1)][0] = std::to_string(s1);
            idx[0] = s1;
            for (int s2 = 1; s2 <= shape[1]; ++s2) {
                idx[1] = s2;
                cells[static_cast<std::size_t>(s1)][static_cast<std::size_t>(s2)] = fraction_string(joint.mass_at(idx));
            }
        }
        std::vector<std::size_t> width(static_cast<std::size_t>(shape[1] + 1), 0);
        for (const auto& row : cells)
            for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
        for (const auto& row : cells) {
            std::string line;
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c > 0) line.push_back(' ');
                line += pad_left(row[c], width[c]);
            }
            while (!line.empty() && line.back() == ' ') line.pop_back();
            out << line << '\n';
        }
        int i = n - 3;
        for (; i >= 0; --i) {
            if (++tail[static_cast<std::size_t>(i)] <= shape[static_cast<std::size_t>(i + 2)]) break;
            tail[static_cast<std::size_t>(i)] = 1;
        }
        if (i < 0) break;
        out << '\n';
    }
    return out.str();
}

} // namespace discop
