#include "locald.h"

int run(void) {
    size_t edges[] = {0, 1, 1, 2, 2, 0};
    LocaldGraph *g = NULL;
    LocaldDecomposition *d = NULL;
    int64_t labels[3];
    if (locald_abi_version() != LOCALD_ABI_VERSION) return 1;
    if (locald_graph_from_edges(3, edges, 3, &g) != LOCALD_STATUS_OK) return 2;
    if (locald_exp_clock_ldd(g, 0.5, 0, 7, NULL, &d) != LOCALD_STATUS_OK) return 3;
    if (locald_decomposition_labels(d, labels, 3) != LOCALD_STATUS_OK) return 4;
    locald_decomposition_free(d);
    locald_graph_free(g);
    return 0;
}
