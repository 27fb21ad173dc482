// placeholder; replaced once the scenario and sim layers exist
int main() { return 0; }
