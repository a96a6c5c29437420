package demo;

// standalone note
public class Demo {
    int a;
    /* block starts
     * middle
     */
    int b;

    void m() {
        a = 1;
        b = 2;
    }
// tail note
    void n() {
        a = 3;
    }

}
