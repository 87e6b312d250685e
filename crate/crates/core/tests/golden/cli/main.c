/* Generated by hoc. Compile with: -fno-strict-aliasing -fwrapv -std=gnu99 */
#include "ho_runtime.h"

void ho_sender_0_body(ho_addr ho_base)
{
    __label__ ho_abort;
    const int64_t ho_module_id = 0;
    const int64_t ho_instance = 0;
    (void)ho_base;
    (void)ho_module_id;
    (void)ho_instance;
    ho_addr ho_frame = ho_push(0);
    {
        if ((int64_t)((int64_t)ho_pending((ho_base + 0u)) == 0) != 0)
        {
            { ho_addr ho_p = (ho_base + 0u); int64_t ho_n = INT64_C(8); HO_PORT_OP(ho_new(ho_p, ho_n), 1, "main.ho", 9); }
        }
        (void)({ ho_addr ho_t1 = (ho_base + 0u); ho_addr ho_t2 = (ho_instance_base(1u + 0) + 0u); (int64_t)ho_send(ho_t1, ho_t2); });
    }
    ho_pop(ho_frame);
    return;
ho_abort: __attribute__((unused));
    ;
}

void ho_receiver_0_body(ho_addr ho_base)
{
    __label__ ho_abort;
    const int64_t ho_module_id = 1;
    const int64_t ho_instance = 0;
    (void)ho_base;
    (void)ho_module_id;
    (void)ho_instance;
    ho_addr ho_frame = ho_push(0);
    {
        if ((int64_t)ho_pending((ho_base + 0u)) != 0)
        {
            { ho_addr ho_d = (ho_base + 4u); int64_t ho_v = ({ int64_t ho_t4 = (ho_load((ho_base + 4u), 4, 0) + ({ int64_t ho_t3 = ho_count((ho_base + 0u)); HO_GUARD(ho_t3 < 0, 2, HO_FAULT_EMPTY_PORT, "main.ho", 17); ho_t3 < 0 ? 0 : ho_t3; })); HO_GUARD(!ho_fits(ho_t4, 32, 0), 3, HO_FAULT_NARROWING, "main.ho", 17); ho_wrap(ho_t4, 32, 0); }); ho_store(ho_d, 4, ho_v); }
            ho_log("receiver", ho_instance, "total", 1, ho_load((ho_base + 4u), 4, 0));
            ho_dispose((ho_base + 0u));
        }
    }
    ho_pop(ho_frame);
    return;
ho_abort: __attribute__((unused));
    ;
}

void ho_register_main(void)
{
    ho_add_instance("sender", 0, 0, 4, ho_sender_0_body);
    ho_add_instance("receiver", 0, 1, 8, ho_receiver_0_body);
    ho_export("receiver", 0, "inbox", 0);
    ho_export("receiver", 0, "total", 4);
}
