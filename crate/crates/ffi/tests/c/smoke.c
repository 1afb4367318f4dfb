#include <stdio.h>
#include <string.h>

#include "symrigid.h"

int main(void) {
    SymrigidGraph *g = NULL;
    if (symrigid_graph_gallery("counterexample-fixed", 8, &g) != SYMRIGID_STATUS_OK) {
        fprintf(stderr, "gallery: %s\n", symrigid_last_error());
        return 1;
    }
    SymrigidOrbitRank r;
    if (symrigid_orbit_rank(g, 4, 5, 0, &r) != SYMRIGID_STATUS_OK || r.nullity != 1) {
        fprintf(stderr, "orbit rank failed\n");
        return 1;
    }
    char *text = NULL;
    bool special = false;
    if (symrigid_reduce_text(g, 4, 0, &text, &special) != SYMRIGID_STATUS_INPUT) {
        fprintf(stderr, "reduction should refuse k=8\n");
        return 1;
    }
    symrigid_graph_free(g);
    printf("ok nullity=%zu\n", r.nullity);
    return 0;
}
