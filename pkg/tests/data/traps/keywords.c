/* Control statements at file scope inside macros and keyword parentheses. */
#define LOOP(x) for (;;) { x(); }
#define WRAP(body) do { body } while (0)
#define fake_def(a) { a(); }

int real_one(int x)
{
	if (x) { return 1; }
	while (x) { x--; }
	for (x = 0; x < 3; x++) { ; }
	switch (x) { case 1: break; default: break; }
	return sizeof(x);
}
