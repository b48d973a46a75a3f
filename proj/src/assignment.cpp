#include <expanal/assignment.hpp>
#include <expanal/error.hpp>

#include <algorithm>
#include <limits>

namespace expanal
{

namespace
{

void require_square(const Eigen::MatrixXd& cost)
{
    if (cost.rows() != cost.cols())
    {
        throw Error(ErrorCode::ShapeMismatch, "assignment needs a square cost matrix");
    }
    if (!cost.allFinite())
    {
        throw Error(ErrorCode::NonFinite, "assignment cost contains NaN or infinite entries");
    }
}

} // namespace

std::vector<int> hungarian_assignment(const Eigen::MatrixXd& cost)
{
    require_square(cost);
    const int n = static_cast<int>(cost.rows());
    if (n == 0)
    {
        return {};
    }

    // Shortest augmenting paths with row/column potentials; arrays are
    // 1-based with column 0 as the virtual source.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);

    for (int i = 1; i <= n; ++i)
    {
        match[0]      = i;
        int j0        = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do
        {
            used[j0]     = 1;
            const int i0 = match[j0];
            double delta = inf;
            int j1       = 0;
            for (int j = 1; j <= n; ++j)
            {
                if (used[j])
                {
                    continue;
                }
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j])
                {
                    minv[j] = cur;
                    way[j]  = j0;
                }
                if (minv[j] < delta)
                {
                    delta = minv[j];
                    j1    = j;
                }
            }
            for (int j = 0; j <= n; ++j)
            {
                if (used[j])
                {
                    u[match[j]] += delta;
                    v[j] -= delta;
                }
                else
                {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);

        do
        {
            const int j1 = way[j0];
            match[j0]    = match[j1];
            j0           = j1;
        } while (j0 != 0);
    }

    std::vector<int> assignment(n, -1);
    for (int j = 1; j <= n; ++j)
    {
        assignment[match[j] - 1] = j - 1;
    }
    return assignment;
}

std::vector<int> greedy_assignment(const Eigen::MatrixXd& cost)
{
    require_square(cost);
    const int n = static_cast<int>(cost.rows());

    struct Cell
    {
        double c;
        int i;
        int j;
    };
    std::vector<Cell> cells;
    cells.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
    {
        for (int j = 0; j < n; ++j)
        {
            cells.push_back({cost(i, j), i, j});
        }
    }
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        if (a.c != b.c)
        {
            return a.c < b.c;
        }
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });

    std::vector<int> assignment(n, -1);
    std::vector<char> taken(n, 0);
    int remaining = n;
    for (const auto& cell : cells)
    {
        if (remaining == 0)
        {
            break;
        }
        if (assignment[cell.i] < 0 && !taken[cell.j])
        {
            assignment[cell.i] = cell.j;
            taken[cell.j]      = 1;
            --remaining;
        }
    }
    return assignment;
}

double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& assignment)
{
    double total = 0.0;
    for (std::size_t i = 0; i < assignment.size(); ++i)
    {
        total += cost(static_cast<Eigen::Index>(i), assignment[i]);
    }
    return total;
}

bool is_permutation_of_range(const std::vector<int>& p)
{
    std::vector<char> seen(p.size(), 0);
    for (int v : p)
    {
        if (v < 0 || static_cast<std::size_t>(v) >= p.size() || seen[v])
        {
            return false;
        }
        seen[v] = 1;
    }
    return true;
}

} // namespace expanal
