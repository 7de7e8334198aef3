#include <stdio.h>
#include <string.h>
#include "gda.h"

static const char *SPEC =
    "ambient_rank = 2\n"
    "gamma_e = [[1, 0], [0, 1]]\n"
    "commutation = [[\"1\", \"-1\"], [\"-1\", \"1\"]]\n"
    "[field]\nkind = \"gf\"\np = 13\n";

int main(void) {
    GdaAlgebra *a = NULL;
    if (gda_algebra_from_toml(SPEC, &a) != GDA_STATUS_OK) {
        fprintf(stderr, "load: %s\n", gda_last_error_message());
        return 1;
    }
    char *out = NULL;
    if (gda_sk(a, 2, 1, 0, &out) != GDA_STATUS_OK) {
        fprintf(stderr, "sk: %s\n", gda_last_error_message());
        return 1;
    }
    printf("%s\n", out);
    gda_string_free(out);
    GdaAlgebra *bad = NULL;
    GdaStatus st = gda_algebra_from_toml("ambient_rank = 1\n", &bad);
    gda_algebra_free(a);
    return st == GDA_STATUS_INVALID_INPUT ? 0 : 2;
}
