const char *s1 = "int fake_in_string(void) { return 0; }";
const char *s2 = "unterminated ( { ";
char c1 = '{';
char c2 = '}';
char c3 = '(';
// int fake_in_line_comment(void) { }
/* int fake_in_block_comment(void)
{
}
*/
const char *s3 = "escaped \" quote { still_string(); }";
const char *s4 = "line \
continued() {";

int literal_host(void)
{
	const char *p = "}";
	char q = '{';
	return p[0] + q;
}
